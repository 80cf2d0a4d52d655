"""Region-of-attraction estimates around the stable equilibrium.

The quadratic Lyapunov candidate ``V(w) = w^T A w`` in coordinates shifted
to the equilibrium is grown as far as the sampled boundary condition
``f(w)^T A w < 0`` allows.  Brute-force integration maps complement the
certified ellipses, and the pursuer-position-independent region for
circular pursuit is the largest origin-centred disk inside the ellipse.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import solve_continuous_lyapunov
from scipy.optimize import minimize, minimize_scalar

from ._parallel import pmap
from .dynamics import D_MIN
from .equilibria import Equilibrium, solve_spiral, stable_equilibrium
from .errors import (
    CertificationError,
    EmptyIntersectionError,
    HerdlabError,
    NotHurwitzError,
    SeedInfeasibleError,
    ValidationError,
)
from .integrate import IntegratorSettings, Termination, detect_convergence, simulate
from .model import Mode, PursuitParams, RotatingCartesian, spiral_kappa_bound
from .stability import classify, jacobian_numeric

__all__ = [
    "EllipsoidRegion",
    "OptimizationResult",
    "KappaEntry",
    "SpiralRegionSummary",
    "Outcome",
    "RegionMap",
    "PiRoaResult",
    "shifted_rhs",
    "shifted_field",
    "lyapunov_seed",
    "boundary_points",
    "optimize_ellipsoid",
    "equilibrium_region",
    "stable_region_spiral",
    "brute_force_region",
    "max_inscribed_radius",
    "pi_roa",
    "default_t_end",
]

SAMPLES = 256
DENSE_FACTOR = 4
EPS0 = 1e-8
COSINE_MARGIN = 1e-3


# --------------------------------------------------------------------------
# shifted dynamics


def _field_uv(points: np.ndarray, params: PursuitParams, kappa: float,
              d_min: float = D_MIN) -> np.ndarray:
    """Single-evader ``(u, v)`` field on an ``(m, 2)`` array; NaN inside the guard."""
    u, v = points[:, 0], points[:, 1]
    if params.k1 == 0.0:
        rp = params.R
    else:
        rp = params.R * np.exp(params.k1 * (np.sqrt(u * u + v * v) - kappa))
    du = u - rp
    d2 = du * du + v * v
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = np.where(d2 > d_min * d_min, params.k / (d2 * np.sqrt(d2)), np.nan)
    return np.stack([du * inv + params.omega * v, v * inv - params.omega * u], axis=1)


def shifted_rhs(w, kappa: float, params: PursuitParams, eq: Equilibrium,
                d_min: float = D_MIN) -> np.ndarray:
    """Field of the farthest evader in coordinates centred on ``eq``.

    ``w`` is ``(u - u*, v - v*)``, a single pair or an ``(m, 2)`` array.
    ``kappa`` overrides ``params.kappa``.  Points within ``d_min`` of the
    pursuer give NaN rows.
    """
    w = np.asarray(w, dtype=float)
    pts = np.atleast_2d(w) + np.array([eq.u_star, eq.v_star])
    out = _field_uv(pts, params, kappa, d_min)
    return out[0] if w.ndim == 1 else out


def shifted_field(params: PursuitParams, eq: Equilibrium, kappa: float | None = None,
                  d_min: float = D_MIN) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorised ``f(w)`` for :func:`optimize_ellipsoid`."""
    kappa = params.kappa if kappa is None else kappa
    return lambda w: shifted_rhs(w, kappa, params, eq, d_min)


def lyapunov_seed(J, normalize: bool = True) -> np.ndarray:
    """Solve ``A J + J^T A = -I`` for symmetric positive-definite ``A``.

    Parameters
    ----------
    J : array_like, shape (2, 2)
        Must be Hurwitz.
    normalize : bool
        Scale the solution so its largest eigenvalue is 1.

    Raises
    ------
    NotHurwitzError
        If some eigenvalue of ``J`` has a non-negative real part.
    """
    J = np.asarray(J, dtype=float)
    eig = np.linalg.eigvals(J)
    if not np.all(eig.real < 0):
        raise NotHurwitzError(f"Jacobian eigenvalues {eig} are not all in the open left half-plane")
    A = solve_continuous_lyapunov(J.T, -np.eye(J.shape[0]))
    A = 0.5 * (A + A.T)
    if normalize:
        A = A / np.linalg.eigvalsh(A).max()
    return A


# --------------------------------------------------------------------------
# ellipses


def boundary_points(A, n: int) -> np.ndarray:
    """``n`` points of ``{w : w^T A w = 1}`` uniform in the Cholesky angle."""
    L = np.linalg.cholesky(np.asarray(A, dtype=float))
    th = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    return np.linalg.solve(L.T, np.stack([np.cos(th), np.sin(th)])).T


@dataclass(frozen=True)
class EllipsoidRegion:
    """``{p : (p - center)^T A (p - center) <= 1}`` in the rotating ``(u, v)`` frame."""

    center: RotatingCartesian
    A: np.ndarray
    kappa: float | None = None
    certified_points: int = 0
    certified_max: float = float("nan")

    def __post_init__(self) -> None:
        A = np.asarray(self.A, dtype=float)
        if A.shape != (2, 2) or not np.allclose(A, A.T, rtol=0, atol=1e-12 * np.abs(A).max()):
            raise ValidationError("A", "must be a symmetric 2x2 matrix")
        if not np.all(np.linalg.eigvalsh(A) > 0):
            raise ValidationError("A", "must be positive definite")
        object.__setattr__(self, "A", 0.5 * (A + A.T))
        object.__setattr__(self, "center", RotatingCartesian(*map(float, self.center)))

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.A))

    @property
    def area(self) -> float:
        return math.pi / math.sqrt(self.det)

    @property
    def semi_axes(self) -> tuple[float, float]:
        lam = np.linalg.eigvalsh(self.A)
        return float(1.0 / math.sqrt(lam[1])), float(1.0 / math.sqrt(lam[0]))

    def value(self, points) -> np.ndarray:
        """``V`` at ``(u, v)`` points."""
        w = np.atleast_2d(np.asarray(points, dtype=float)) - np.asarray(self.center)
        return np.einsum("ij,jk,ik->i", w, self.A, w)

    def contains(self, points, rtol: float = 0.0) -> np.ndarray:
        return self.value(points) <= 1.0 + rtol

    def boundary(self, n: int = 512) -> np.ndarray:
        return boundary_points(self.A, n) + np.asarray(self.center)

    def contains_circle(self, radius: float, center=(0.0, 0.0), n: int = 4096,
                        angle_range: tuple[float, float] | None = None) -> bool:
        """Whether the sampled circle (or arc over ``angle_range``) lies inside."""
        lo, hi = angle_range if angle_range is not None else (-math.pi, math.pi)
        th = np.linspace(lo, hi, n, endpoint=angle_range is not None)
        pts = np.asarray(center, dtype=float) + radius * np.stack([np.cos(th), np.sin(th)], axis=1)
        return bool(np.all(self.contains(pts)))

    def rotated(self, theta: float) -> "EllipsoidRegion":
        """The same region seen in a frame turned by ``theta``."""
        c, s = math.cos(theta), math.sin(theta)
        Q = np.array([[c, -s], [s, c]])
        center = Q @ np.asarray(self.center)
        return EllipsoidRegion(RotatingCartesian(*center), Q @ self.A @ Q.T, self.kappa,
                               self.certified_points, self.certified_max)

    def as_dict(self) -> dict:
        return {
            "center": list(self.center),
            "A": self.A.tolist(),
            "kappa": self.kappa,
            "det": self.det,
            "area": self.area,
            "semi_axes": list(self.semi_axes),
            "certified_points": self.certified_points,
            "certified_max": self.certified_max,
        }


@dataclass
class OptimizationResult:
    A: np.ndarray
    seed: np.ndarray
    det_history: list = field(default_factory=list)
    iterations: int = 0
    certified_max: float = float("nan")
    certified_points: int = 0


def _cosines(fld, A: np.ndarray, n: int) -> np.ndarray:
    """``cos`` of the angle between ``f(w)`` and ``A w`` on the boundary; NaN -> 1."""
    W = boundary_points(A, n)
    F = fld(W)
    AW = W @ A
    with np.errstate(invalid="ignore", divide="ignore"):
        g = np.sum(F * AW, axis=1) / (np.linalg.norm(F, axis=1) * np.linalg.norm(AW, axis=1))
    return np.where(np.isfinite(g), g, 1.0)


def _violation(fld, A: np.ndarray, n: int, margin: float) -> float:
    return float(_cosines(fld, A, n).max() + margin)


def _certify(fld, A: np.ndarray, n: int, eps0: float = EPS0) -> float:
    """Largest ``f^T A w + eps0 |w|^2`` on ``n`` boundary points (must be <= 0)."""
    W = boundary_points(A, n)
    F = fld(W)
    val = np.sum(F * (W @ A), axis=1) + eps0 * np.sum(W * W, axis=1)
    val = np.where(np.isfinite(val), val, np.inf)
    return float(val.max())


def _from_entries(x) -> np.ndarray:
    return np.array([[x[0], x[1]], [x[1], x[2]]])


def _scale_seed(fld, seed: np.ndarray, samples: int, margin: float, max_axis: float) -> np.ndarray:
    """Largest ``seed / s^2`` that satisfies the sampled constraint (bisection on ``s``)."""
    lam_min = float(np.linalg.eigvalsh(seed).min())
    s_cap = max_axis * math.sqrt(lam_min)  # largest semi-axis = s / sqrt(lam_min)
    ok = lambda s: _violation(fld, seed / (s * s), samples, margin) <= 0.0  # noqa: E731
    lo = min(1e-6, s_cap)
    if not ok(lo):
        raise SeedInfeasibleError("the boundary condition fails even for a vanishing multiple "
                                  "of the Lyapunov seed")
    hi = lo
    while hi < s_cap:
        nxt = min(2.0 * hi, s_cap)
        if not ok(nxt):
            hi = nxt
            break
        lo = hi = nxt
    if lo < hi:
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if ok(mid):
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-12 * hi:
                break
    return seed / (lo * lo)


def optimize_ellipsoid(fld: Callable[[np.ndarray], np.ndarray], seed, samples: int = SAMPLES, *,
                       margin: float = COSINE_MARGIN, max_semi_axis: float = 100.0,
                       eps0: float = EPS0, maxiter: int = 4000,
                       restarts: int = 3) -> OptimizationResult:
    """Minimise ``det(A)`` subject to the sampled boundary-negativity constraint.

    Parameters
    ----------
    fld : callable
        Shifted field, ``(m, 2) -> (m, 2)``, with its equilibrium at the origin.
    seed : array_like
        Positive-definite starting matrix, usually from :func:`lyapunov_seed`.
        It is first scaled up to the largest certified multiple.
    samples : int
        Boundary points used while optimising.
    margin : float
        During optimisation the cosine between ``f`` and ``A w`` must stay
        below ``-margin`` so the result survives the denser certification.
    max_semi_axis : float
        Cap on the largest semi-axis; keeps globally stable fields bounded.
    eps0 : float
        Certification requires ``f^T A w <= -eps0 |w|^2`` at
        ``4 * samples`` boundary points.

    Returns
    -------
    OptimizationResult
        ``det_history`` holds the best certified determinant after each
        optimiser iteration and is non-increasing.

    Raises
    ------
    SeedInfeasibleError
    CertificationError
        If the optimised ellipse fails the densified check.
    """
    seed = np.asarray(seed, dtype=float)
    seed_scaled = _scale_seed(fld, seed, samples, margin, max_semi_axis)
    det_seed = float(np.linalg.det(seed_scaled))
    floor = 1.0 / (max_semi_axis * max_semi_axis)

    def feasible(A: np.ndarray) -> float:
        """0 when admissible, otherwise a positive violation."""
        lam = np.linalg.eigvalsh(A)
        if not np.all(np.isfinite(lam)) or lam[0] <= 0:
            return 1.0 + abs(float(lam[0])) if np.all(np.isfinite(lam)) else 1e6
        if lam[0] < floor * (1 - 1e-12):
            return 1.0 + (floor - lam[0]) / floor
        return max(0.0, _violation(fld, A, samples, margin))

    best = {"A": seed_scaled, "det": det_seed}
    history = [det_seed]

    def objective(x) -> float:
        A = _from_entries(x)
        v = feasible(A)
        if v > 0:
            return 10.0 + v
        det = float(np.linalg.det(A))
        if det < best["det"]:
            best["A"], best["det"] = A, det
        return det / det_seed

    iterations = 0
    start = seed_scaled
    for _ in range(max(1, restarts)):
        res = minimize(objective, [start[0, 0], start[0, 1], start[1, 1]], method="Nelder-Mead",
                       callback=lambda xk: history.append(best["det"]),
                       options=dict(maxiter=maxiter, xatol=1e-12, fatol=1e-12, adaptive=True))
        iterations += int(res.nit)
        if np.array_equal(start, best["A"]):
            break
        start = best["A"]

    A = best["A"]
    dense = DENSE_FACTOR * samples
    worst = _certify(fld, A, dense, eps0)
    if not worst <= 0.0:
        raise CertificationError(
            f"optimised ellipse violates f^T A w <= -eps0 |w|^2 on the {dense}-point check "
            f"(max {worst:.3e})"
        )
    return OptimizationResult(A, seed_scaled, history, iterations, worst, dense)


def default_max_axis(params: PursuitParams) -> float:
    return 10.0 * params.R


def equilibrium_region(params: PursuitParams, eq: Equilibrium | None = None, *,
                       kappa: float | None = None, samples: int = SAMPLES,
                       margin: float = COSINE_MARGIN,
                       max_semi_axis: float | None = None) -> EllipsoidRegion:
    """Certified ellipse around ``eq`` (default: the stable equilibrium)."""
    kappa = params.kappa if kappa is None else kappa
    if kappa != params.kappa:
        params = params.replace(kappa=kappa)
    eq = stable_equilibrium(params) if eq is None else eq
    fld = shifted_field(params, eq, kappa)
    J = jacobian_numeric(lambda w: fld(np.atleast_2d(w))[0], np.zeros(2))
    seed = lyapunov_seed(J)
    max_axis = default_max_axis(params) if max_semi_axis is None else max_semi_axis
    res = optimize_ellipsoid(fld, seed, samples, margin=margin, max_semi_axis=max_axis)
    return EllipsoidRegion(RotatingCartesian(eq.u_star, eq.v_star), res.A,
                           kappa if params.mode is Mode.SPIRAL else None,
                           res.certified_points, res.certified_max)


# --------------------------------------------------------------------------
# spiral sweep over kappa


@dataclass(frozen=True)
class KappaEntry:
    kappa: float
    equilibrium: Equilibrium | None
    region: EllipsoidRegion | None
    member: bool
    error: str = ""

    def as_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "equilibrium": None if self.equilibrium is None else self.equilibrium.as_dict(),
            "region": None if self.region is None else self.region.as_dict(),
            "member": self.member,
            "error": self.error,
        }


@dataclass(frozen=True)
class SpiralRegionSummary:
    entries: tuple
    c: float
    psi_range: tuple

    @property
    def union(self) -> list[float]:
        """The ``kappa`` values whose whole initial circle is certified."""
        return [e.kappa for e in self.entries if e.member]

    def as_dict(self) -> dict:
        return {
            "c": self.c,
            "psi_range": list(self.psi_range),
            "union": self.union,
            "entries": [e.as_dict() for e in self.entries],
        }


def default_kappa_grid(params: PursuitParams, points: int = 64) -> np.ndarray:
    c = spiral_kappa_bound(params.k1, params.R)
    if c is None or c <= 0.01:
        raise ValidationError("k1", "2 k1^2 R^2 must exceed exp(0.02) for a kappa grid")
    return np.linspace(0.01, 0.999 * c, points)


def _kappa_entry(params: PursuitParams, kappa: float, samples: int,
                 psi_range: tuple[float, float] | None) -> KappaEntry:
    eq = None
    try:
        p = params.replace(kappa=float(kappa))
        eq = solve_spiral(p)[0]
        region = equilibrium_region(p, eq, samples=samples)
        member = region.contains_circle(float(kappa), angle_range=psi_range)
        return KappaEntry(float(kappa), eq, region, member)
    except (HerdlabError, ValueError, np.linalg.LinAlgError) as exc:
        return KappaEntry(float(kappa), eq, None, False, f"{type(exc).__name__}: {exc}")


def stable_region_spiral(params: PursuitParams, kappa_grid: Sequence[float] | None = None, *,
                         samples: int = SAMPLES, psi_range: tuple[float, float] | None = None,
                         threads: int | None = None) -> SpiralRegionSummary:
    """Certified ellipse and circle-membership test for every ``kappa`` on a grid.

    ``params.kappa`` is ignored.  ``psi_range`` restricts the initial circle
    ``{r = kappa}`` to an arc; the default is the full circle.  Failures for
    individual ``kappa`` values are recorded on the entry.
    """
    if params.mode is not Mode.SPIRAL:
        raise ValidationError("mode", "stable_region_spiral requires spiral pursuit")
    c = spiral_kappa_bound(params.k1, params.R)
    if c is None:
        raise ValidationError("k1", "2 k1^2 R^2 must exceed 1")
    grid = default_kappa_grid(params) if kappa_grid is None else np.asarray(kappa_grid, float)
    bad = [k for k in grid if not 0 < k < c]
    if bad:
        raise ValidationError("kappa_grid", f"values must lie in (0, {c:.6g}); got {bad[:3]}")
    entries = pmap(lambda k: _kappa_entry(params, k, samples, psi_range), grid, threads)
    pr = (-math.pi, math.pi) if psi_range is None else tuple(psi_range)
    return SpiralRegionSummary(tuple(entries), c, pr)


# --------------------------------------------------------------------------
# brute force


class Outcome(enum.IntEnum):
    CONVERGED = 0
    DIVERGED = 1
    SINGULAR = 2
    UNDECIDED = 3


@dataclass
class RegionMap:
    """Integration outcome for every ``(r(0), psi(0))`` cell of a grid.

    ``outcomes[i, j]`` belongs to ``r_values[i]`` and ``psi_values[j]``.
    """

    r_values: np.ndarray
    psi_values: np.ndarray
    outcomes: np.ndarray
    t_converged: np.ndarray
    params: PursuitParams
    anchor: tuple | None = None
    t_end: float = 0.0

    def count(self, outcome: Outcome) -> int:
        return int(np.sum(self.outcomes == int(outcome)))

    def as_dict(self) -> dict:
        return {
            "params": self.params.as_dict(),
            "anchor": None if self.anchor is None else list(self.anchor),
            "t_end": self.t_end,
            "r_values": self.r_values.tolist(),
            "psi_values": self.psi_values.tolist(),
            "outcomes": [[Outcome(o).name.title() for o in row] for row in self.outcomes],
            "counts": {o.name.title(): self.count(o) for o in Outcome},
        }


def default_t_end(params: PursuitParams, eq: Equilibrium | None = None) -> float:
    """Long enough for a perturbation to decay by ``e^-25``, and at least 20 revolutions."""
    eq = stable_equilibrium(params) if eq is None else eq
    rate = -classify(params, eq).margin
    t = 25.0 / rate if rate > 0 else 0.0
    return max(t, 20.0 * params.period)


def _run_cell(params: PursuitParams, s0: np.ndarray, targets: list, t_end: float, tol: float,
              escape: float, backend: str | None) -> tuple[Outcome, float]:
    settings = IntegratorSettings(t_end=t_end)
    window = 2.0 * params.period
    target = targets[0] if len(targets) == 1 else None
    traj = simulate(params, s0, settings, target=target, tol=tol, window=window,
                    escape_radius=escape, backend=backend)
    if traj.termination in (Termination.SINGULAR, Termination.DOMAIN_ERROR):
        return Outcome.SINGULAR, math.nan
    if traj.termination is Termination.ESCAPED:
        return Outcome.DIVERGED, math.nan
    if traj.span < window:
        return Outcome.UNDECIDED, math.nan
    for eq in targets:
        rep = detect_convergence(traj, eq, tol, window)
        if rep.converged:
            return Outcome.CONVERGED, float(rep.t_converged)
    return Outcome.UNDECIDED, math.nan


def brute_force_region(params: PursuitParams, r_values: Sequence[float],
                       psi_values: Sequence[float], *, anchor: tuple | None = None,
                       t_end: float | None = None, tol: float = 1e-4,
                       threads: int | None = None, backend: str | None = None) -> RegionMap:
    """Classify a grid of initial conditions by direct integration.

    Without ``anchor`` each cell is the farthest evader itself, so for
    spiral pursuit ``kappa`` is the cell's radius and the target is that
    ``kappa``'s equilibrium.  With ``anchor = (kappa, psi0)`` evader 0
    starts there and the cell is a second evader; both must reach the
    shared equilibrium.  Trajectories leaving ``|state| > 10 R`` are
    Diverged; those neither converged nor escaped by ``t_end`` are Undecided.
    """
    r_values = np.asarray(r_values, dtype=float)
    psi_values = np.asarray(psi_values, dtype=float)
    if np.any(r_values <= 0):
        raise ValidationError("r_values", "grid radii must be > 0")
    escape = 10.0 * params.R
    if anchor is not None:
        kappa, psi0 = map(float, anchor)
        base = params.replace(kappa=kappa)
        eq_all = [stable_equilibrium(base)] if base.mode is Mode.CIRCULAR else solve_spiral(base)
        t_final = default_t_end(base, eq_all[0]) if t_end is None else t_end
        e0 = [kappa * math.cos(psi0), kappa * math.sin(psi0)]

        def cell(rp):
            r, psi = rp
            s0 = np.array(e0 + [r * math.cos(psi), r * math.sin(psi)])
            return _run_cell(base, s0, eq_all, t_final, tol, escape, backend)
    else:
        shared = None
        if params.mode is Mode.CIRCULAR:
            shared = [stable_equilibrium(params)]
        t_final = t_end if t_end is not None else default_t_end(
            params, shared[0] if shared else None)

        def cell(rp):
            r, psi = rp
            p = params if shared else params.replace(kappa=r)
            try:
                eqs = shared or solve_spiral(p)
            except HerdlabError:
                return Outcome.UNDECIDED, math.nan
            s0 = np.array([r * math.cos(psi), r * math.sin(psi)])
            return _run_cell(p, s0, eqs, t_final, tol, escape, backend)

    cells = [(r, psi) for r in r_values for psi in psi_values]
    results = pmap(cell, cells, threads)
    shape = (r_values.size, psi_values.size)
    outcomes = np.array([int(o) for o, _ in results], dtype=np.int8).reshape(shape)
    t_conv = np.array([t for _, t in results]).reshape(shape)
    return RegionMap(r_values, psi_values, outcomes, t_conv, params,
                     None if anchor is None else tuple(map(float, anchor)), float(t_final))


# --------------------------------------------------------------------------
# pursuer-position-independent region (circular pursuit)


@dataclass
class PiRoaResult:
    """Largest origin-centred disk inside every rotated copy of the ellipse."""

    r_max: float
    boundary_distance: float
    theta_samples: int
    region: EllipsoidRegion
    radius_grid: np.ndarray = field(repr=False, default_factory=lambda: np.empty(0))
    ellipses: list = field(default_factory=list, repr=False)

    def as_dict(self) -> dict:
        return {
            "r_max": self.r_max,
            "boundary_distance": self.boundary_distance,
            "theta_samples": self.theta_samples,
            "region": self.region.as_dict(),
            "ellipses": [e.as_dict() for e in self.ellipses],
        }


def _origin_distance(region: EllipsoidRegion) -> float:
    """Distance from the origin to the ellipse boundary (origin assumed inside)."""
    L = np.linalg.cholesky(region.A)
    c = np.asarray(region.center)

    def dist(t):
        w = np.linalg.solve(L.T, [math.cos(t), math.sin(t)])
        return float(np.hypot(*(w + c)))

    th = np.linspace(0.0, 2.0 * math.pi, 2048, endpoint=False)
    vals = np.array([dist(t) for t in th])
    i = int(vals.argmin())
    step = th[1] - th[0]
    res = minimize_scalar(dist, bounds=(th[i] - step, th[i] + step), method="bounded",
                          options=dict(xatol=1e-13))
    return min(float(vals[i]), float(res.fun))


def max_inscribed_radius(region: EllipsoidRegion, radius_grid) -> tuple[float, float]:
    """Largest grid radius whose origin-centred circle lies in ``region``.

    Returns ``(r_max, distance)`` where ``distance`` is the exact distance
    from the origin to the ellipse boundary.

    Raises
    ------
    EmptyIntersectionError
        If the origin itself lies outside the region.
    """
    if not bool(region.contains([(0.0, 0.0)])[0]):
        raise EmptyIntersectionError("the equilibrium-centred ellipse excludes the origin")
    d = _origin_distance(region)
    grid = np.sort(np.asarray(radius_grid, dtype=float))
    ok = grid[grid <= d * (1.0 + 1e-9)]
    return (float(ok.max()) if ok.size else 0.0), d


def pi_roa(params: PursuitParams, eq_s2: Equilibrium | None = None, theta_samples: int = 64,
           radius_grid: int | Sequence[float] = 256, *, region: EllipsoidRegion | None = None,
           samples: int = SAMPLES, keep_ellipses: bool = False) -> PiRoaResult:
    """Pursuer-position-independent region of attraction of the stable limit cycle.

    The certified ellipse is computed once in the rotating frame; a different
    initial pursuer phase ``theta`` only rotates it about the origin, and the
    origin-centred disk is rotation invariant, so the intersection over all
    phases contains the largest such disk inside the single ellipse.
    ``radius_grid`` is a count (uniform on ``[0, d]`` with ``d`` an upper
    bound on the answer) or explicit radii.
    """
    if region is None:
        if params.mode is not Mode.CIRCULAR:
            raise ValidationError("mode", "pi_roa requires circular pursuit")
        eq_s2 = stable_equilibrium(params) if eq_s2 is None else eq_s2
        region = equilibrium_region(params, eq_s2, samples=samples)
    if np.isscalar(radius_grid):
        upper = math.hypot(*region.center) + max(region.semi_axes)
        grid = np.linspace(0.0, upper, int(radius_grid))
    else:
        grid = np.asarray(radius_grid, dtype=float)
    r_max, d = max_inscribed_radius(region, grid)
    thetas = np.linspace(0.0, 2.0 * math.pi, theta_samples, endpoint=False)
    rotated = [region.rotated(t) for t in thetas]
    for t, e in zip(thetas, rotated):
        if r_max > 0 and not e.contains_circle(r_max * (1 - 1e-9), n=1024):
            raise EmptyIntersectionError(f"rotated ellipse at theta={t:.4f} misses the r_max circle")
    return PiRoaResult(r_max, d, theta_samples, region, grid, rotated if keep_ellipses else [])
