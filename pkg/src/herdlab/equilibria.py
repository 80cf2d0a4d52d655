"""Equilibria of the rotating-frame dynamics.

An equilibrium ``(r*, psi*)`` satisfies ``r* = R* cos(psi*)`` and
``cos(psi*) sin^2(psi*) = k / (omega R*^3)`` where ``R* = R exp(k1 (r* - kappa))``
is the pursuer's limit radius.  Eliminating the angle leaves the scalar
equation ``r^3 - R*(r)^2 r + k/omega = 0``: transcendental for spiral pursuit,
a depressed cubic for circular pursuit (``k1 = 0``).
"""

from __future__ import annotations

import cmath
import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import AdmissibilityWarning, ExistenceError, NoRootError, RangeError
from .model import Mode, PursuitParams, check_admissibility

__all__ = [
    "Branch",
    "Equilibrium",
    "CircularRoots",
    "equilibrium_function",
    "solve_spiral",
    "solve_circular",
    "circular_roots",
    "cardano_roots",
    "omega_for_radius",
    "multi_evader_equilibrium",
    "stable_equilibrium",
    "equilibrium_residuals",
]

_XTOL = 1e-14
_RESIDUAL_TOL = 1e-10
_SCAN_POINTS = 10_000


class Branch(str, enum.Enum):
    SPIRAL_UNIQUE = "spiral_unique"
    SPIRAL_MULTIPLE = "spiral_multiple"
    CIRCULAR_INNER = "circular_inner"  # r_s2, stable
    CIRCULAR_OUTER = "circular_outer"  # r_s1, saddle


@dataclass(frozen=True)
class Equilibrium:
    """A rotating-frame equilibrium shared by every evader."""

    r_star: float
    psi_star: float
    R_star: float
    branch: Branch
    residuals: tuple[float, float]

    @property
    def u_star(self) -> float:
        return self.r_star * math.cos(self.psi_star)

    @property
    def v_star(self) -> float:
        return self.r_star * math.sin(self.psi_star)

    def as_dict(self) -> dict:
        return {
            "r_star": self.r_star,
            "psi_star": self.psi_star,
            "R_star": self.R_star,
            "u_star": self.u_star,
            "v_star": self.v_star,
            "branch": self.branch.value,
            "cubic_residual": self.residuals[0],
            "angle_residual": self.residuals[1],
        }


@dataclass(frozen=True)
class CircularRoots:
    r_s1: float
    r_s2: float
    r_s3: float
    sigma1: complex
    sigma2: complex


def equilibrium_function(r, params: PursuitParams):
    """``r^3 - R^2 exp(2 k1 (r - kappa)) r + k/omega``; zero at equilibrium radii."""
    r = np.asarray(r, dtype=float)
    g = params.R ** 2 * np.exp(2.0 * params.k1 * (r - params.kappa))
    return r ** 3 - g * r + params.k / params.omega


def equilibrium_residuals(params: PursuitParams, r: float, psi: float,
                          r0: float | None = None) -> tuple[float, float]:
    """Residuals of ``r = R* cos psi`` and ``cos psi sin^2 psi = k/(omega R*^3)``.

    ``R*`` is evaluated at ``r0`` (evader 0's radius), defaulting to ``r``.
    """
    r0 = r if r0 is None else r0
    Rs = params.R * math.exp(params.k1 * (r0 - params.kappa))
    res_r = r - Rs * math.cos(psi)
    res_psi = math.cos(psi) * math.sin(psi) ** 2 - params.k / (params.omega * Rs ** 3)
    return res_r, res_psi


def _make(params: PursuitParams, r: float, branch: Branch) -> Equilibrium:
    Rs = params.R * math.exp(params.k1 * (r - params.kappa))
    psi = math.acos(min(1.0, r / Rs))
    cubic = float(equilibrium_function(r, params))
    angle = math.cos(psi) * math.sin(psi) ** 2 - params.k / (params.omega * Rs ** 3)
    return Equilibrium(r, psi, Rs, branch, (cubic, angle))


def _expand_bracket(params: PursuitParams) -> float:
    hi = 1.0
    for _ in range(200):
        if equilibrium_function(hi, params) < 0:
            return hi
        hi *= 2.0
    raise NoRootError(0.0, hi)


def solve_spiral(params: PursuitParams) -> list[Equilibrium]:
    """All positive equilibria for spiral pursuit (``k1 > 0``).

    Under the uniqueness condition ``2 k1^2 R^2 > 1`` and
    ``kappa < ln(2 k1^2 R^2) / (2 k1)`` exactly one equilibrium exists and is
    found by bracket doubling from ``r = 0`` followed by Brent's method.
    Otherwise sign changes are scanned on a log-spaced grid and every root is
    returned; an :class:`AdmissibilityWarning` is emitted if there are several.
    """
    if params.k1 <= 0:
        raise ValueError("solve_spiral requires k1 > 0; use solve_circular for k1 = 0")
    f = lambda r: float(equilibrium_function(r, params))  # noqa: E731
    hi = _expand_bracket(params)
    if check_admissibility(params).spiral_ok:
        root = brentq(f, 0.0, hi, xtol=_XTOL, rtol=4 * np.finfo(float).eps, maxiter=500)
        return [_make(params, root, Branch.SPIRAL_UNIQUE)]

    grid = np.concatenate([[0.0], np.logspace(math.log10(hi) - 12, math.log10(hi), _SCAN_POINTS)])
    vals = equilibrium_function(grid, params)
    roots = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0.0 and a > 0:
            roots.append(float(a))
        elif fa * fb < 0:
            roots.append(brentq(f, a, b, xtol=_XTOL, rtol=4 * np.finfo(float).eps, maxiter=500))
    if not roots:
        raise NoRootError(0.0, hi)
    branch = Branch.SPIRAL_UNIQUE if len(roots) == 1 else Branch.SPIRAL_MULTIPLE
    if len(roots) > 1:
        warnings.warn(
            f"spiral parameters violate the uniqueness condition; {len(roots)} equilibria found",
            AdmissibilityWarning,
            stacklevel=2,
        )
    return [_make(params, r, branch) for r in roots]


def circular_roots(params: PursuitParams) -> CircularRoots:
    """Three real roots of ``r^3 - R^2 r + k/omega = 0`` (trigonometric method).

    Ordered ``R > r_s1 > R/sqrt(3) > r_s2 > 0 > r_s3``.  The Cardano
    quantities ``sigma1``, ``sigma2`` are carried along for cross-checks.
    """
    report = check_admissibility(params)
    if not report.circular_ok:
        raise ExistenceError(
            f"k/(omega R^3) = {report.ratio:.6g} outside (0, 2/(3 sqrt 3)); no equilibria"
        )
    R, q = params.R, params.k / params.omega
    m = 2.0 * R / math.sqrt(3.0)
    # cos(3 theta) = -(q/2) / (R^2/3)^(3/2), in (-1, 0) when admissible
    arg = -1.5 * q * math.sqrt(3.0) / R ** 3
    theta = math.acos(max(-1.0, min(1.0, arg))) / 3.0
    r1 = m * math.cos(theta)
    r2 = m * math.cos(theta - 2.0 * math.pi / 3.0)
    r3 = m * math.cos(theta - 4.0 * math.pi / 3.0)
    sigma1, sigma2 = _sigmas(params)
    return CircularRoots(r1, r2, r3, sigma1, sigma2)


def _sigmas(params: PursuitParams) -> tuple[complex, complex]:
    half_q = params.k / (2.0 * params.omega)
    disc = cmath.sqrt(half_q ** 2 - params.R ** 6 / 27.0)
    return (-disc - half_q) ** (1.0 / 3.0), (disc - half_q) ** (1.0 / 3.0)


def cardano_roots(params: PursuitParams) -> tuple[complex, complex, complex]:
    """The closed-form Cardano expressions for ``(r_s1, r_s2, r_s3)``.

    Evaluated with principal complex cube roots; the imaginary parts
    cancel to rounding when the discriminant is negative.
    """
    s1, s2 = _sigmas(params)
    h = math.sqrt(3.0) / 2.0
    r1 = s2 + s1
    r2 = -s2 / 2 + h * s1 * 1j - s1 / 2 - h * s2 * 1j
    r3 = -s2 / 2 - h * s1 * 1j - s1 / 2 + h * s2 * 1j
    return r1, r2, r3


def solve_circular(params: PursuitParams) -> tuple[CircularRoots, Equilibrium, Equilibrium]:
    """Roots and both equilibria ``(s1: saddle, s2: stable)`` for circular pursuit."""
    if params.k1 != 0:
        raise ValueError("solve_circular requires k1 = 0")
    roots = circular_roots(params)
    eq1 = _make(params, roots.r_s1, Branch.CIRCULAR_OUTER)
    eq2 = _make(params, roots.r_s2, Branch.CIRCULAR_INNER)
    return roots, eq1, eq2


def stable_equilibrium(params: PursuitParams) -> Equilibrium:
    """The attracting equilibrium: unique spiral root or circular ``s2``."""
    if params.mode is Mode.CIRCULAR:
        return solve_circular(params)[2]
    eqs = solve_spiral(params)
    return eqs[0]


def omega_for_radius(params: PursuitParams, target_r: float) -> float:
    """Angular velocity whose stable equilibrium radius is ``target_r``.

    ``params.omega`` is ignored.  Circular mode requires
    ``0 < target_r < R / sqrt(3)`` (the stable branch).
    """
    r = float(target_r)
    if not r > 0:
        raise RangeError(f"target radius must be > 0, got {r!r}")
    if params.mode is Mode.CIRCULAR:
        if not r < params.R / math.sqrt(3.0):
            raise RangeError(f"target radius {r} not below R/sqrt(3) = {params.R / math.sqrt(3):.6g}")
        denom = params.R ** 2 * r - r ** 3
    else:
        denom = params.R ** 2 * math.exp(2.0 * params.k1 * (r - params.kappa)) * r - r ** 3
    if not denom > 0:
        raise RangeError(f"no positive omega yields radius {r}")
    omega = params.k / denom
    if params.mode is Mode.SPIRAL and not check_admissibility(params).spiral_ok:
        warnings.warn("spiral uniqueness condition fails; other equilibria may coexist",
                      AdmissibilityWarning, stacklevel=2)
    return omega


def multi_evader_equilibrium(params: PursuitParams, n: int = 1) -> Equilibrium:
    """Equilibrium shared by all ``n`` evaders under spiral pursuit.

    Subtracting evader 0's equation from evader i's leaves
    ``(r_i - r_0)(r_i^2 + r_i r_0 + r_0^2 + R*^2) = 0`` so ``r_i = r_0``; the
    result is therefore the single-evader root.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    eqs = solve_spiral(params)
    if len(eqs) != 1:
        raise ValueError("multiple equilibria: spiral uniqueness condition fails")
    return eqs[0]
