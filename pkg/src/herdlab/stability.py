"""Linearisation and eigenvalue classification of equilibria.

Circular pursuit has closed-form eigenvalues.  Everything else, including
the coupled ``2n``-dimensional system, is linearised with central finite
differences of :func:`herdlab.dynamics.rhs_rotating_polar`.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .dynamics import D_MIN, rhs_rotating_polar
from .equilibria import Equilibrium
from .errors import DomainError
from .model import PursuitParams

__all__ = [
    "StabilityClass",
    "StabilityVerdict",
    "MARGIN_TOL",
    "eigenvalues_circular",
    "jacobian_numeric",
    "coupled_jacobian",
    "printed_jacobian_circular",
    "analytic_jacobian_circular",
    "classify",
    "classify_eigenvalues",
]

MARGIN_TOL = 1e-8


class StabilityClass(str, enum.Enum):
    ASYMPTOTICALLY_STABLE = "AsymptoticallyStable"
    SADDLE = "Saddle"
    UNSTABLE = "Unstable"
    MARGINAL = "Marginal"


@dataclass(frozen=True)
class StabilityVerdict:
    """Eigenvalues of a linearisation and the resulting classification.

    ``margin`` is the largest real part.
    """

    eigenvalues: tuple
    cls: StabilityClass
    margin: float

    def as_dict(self) -> dict:
        return {
            "class": self.cls.value,
            "margin": self.margin,
            "eigenvalues": [[z.real, z.imag] for z in self.eigenvalues],
        }


def eigenvalues_circular(params: PursuitParams, r_star: float) -> tuple[complex, complex]:
    """Closed-form eigenvalues at a circular-pursuit equilibrium of radius ``r_star``.

    Parameters
    ----------
    params : PursuitParams
        Only ``k``, ``R`` and ``omega`` are used.
    r_star : float
        Equilibrium radius, ``0 < r_star < R``.

    Returns
    -------
    tuple of complex
        ``(lambda_plus, lambda_minus)``; a conjugate pair when the radicand
        ``9 k^2 - 4 omega^2 (R^2 - r*^2)^3`` is negative.
    """
    k, R, w = params.k, params.R, params.omega
    if not 0.0 < r_star < R:
        raise DomainError(f"r_star must lie in (0, R={R}), got {r_star}")
    a = R * R - r_star * r_star
    radicand = 9.0 * k * k - 4.0 * w * w * a ** 3
    root = cmath.sqrt(radicand)
    denom = 2.0 * a ** 1.5
    return complex((-k + root) / denom), complex((-k - root) / denom)


def _step(point: np.ndarray) -> float:
    return max(1e-6, 1e-7 * float(np.linalg.norm(point)))


def jacobian_numeric(rhs, point, h: float | None = None) -> np.ndarray:
    """Central-difference Jacobian of ``rhs`` at ``point``.

    Parameters
    ----------
    rhs : callable
        Maps a state vector to a vector of the same length.  Scalar
        functions of a scalar are accepted and give a ``1 x 1`` result.
    point : array_like
    h : float, optional
        Perturbation size; defaults to ``max(1e-6, 1e-7 * ||point||)``.

    Returns
    -------
    ndarray of shape (m, m)
    """
    scalar = np.ndim(point) == 0
    x = np.atleast_1d(np.asarray(point, dtype=float))
    h = _step(x) if h is None else float(h)
    f = (lambda y: rhs(float(y[0]))) if scalar else rhs
    cols = []
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = h
        fp = np.atleast_1d(np.asarray(f(x + e), dtype=float))
        fm = np.atleast_1d(np.asarray(f(x - e), dtype=float))
        cols.append((fp - fm) / (2.0 * h))
    return np.column_stack(cols)


def coupled_jacobian(params: PursuitParams, eq: Equilibrium, n: int = 1,
                     d_min: float = D_MIN) -> np.ndarray:
    """``2n x 2n`` Jacobian of the rotating polar dynamics at the shared equilibrium.

    State layout is ``(r_0, psi_0, r_1, psi_1, ...)``.  Rows of evader
    ``i >= 1`` depend only on evader ``i`` and evader 0.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    point = np.tile([eq.r_star, eq.psi_star], n)
    return jacobian_numeric(lambda s: rhs_rotating_polar(s, params, d_min), point)


def analytic_jacobian_circular(params: PursuitParams, eq: Equilibrium) -> np.ndarray:
    """Exact single-evader polar Jacobian for circular pursuit.

    With ``d = R sin(psi*)`` the entries are ``[[k/d^3, k/d^2],
    [-k/(r*^2 d^2), -2k/d^3]]``.
    """
    k = params.k
    d = params.R * math.sin(eq.psi_star)
    r = eq.r_star
    return np.array([[k / d ** 3, k / d ** 2], [-k / (r * r * d * d), -2.0 * k / d ** 3]])


def printed_jacobian_circular(params: PursuitParams, eq: Equilibrium) -> np.ndarray:
    """The Jacobian as it appears in the original closed-form derivation.

    Kept only for cross-checking: its lower-left entry
    ``-k R^2 cos^2(psi*) / (R sin psi*)^2`` disagrees with the numeric
    linearisation (see :func:`analytic_jacobian_circular`), while the trace
    and the other three entries agree.
    """
    k, R = params.k, params.R
    s, c = math.sin(eq.psi_star), math.cos(eq.psi_star)
    d = R * s
    return np.array([[k / d ** 3, k / d ** 2], [-k * R * R * c * c / d ** 2, -2.0 * k / d ** 3]])


def classify_eigenvalues(eigenvalues, margin_tol: float = MARGIN_TOL) -> StabilityVerdict:
    """Classify a spectrum by the signs of its real parts."""
    eig = tuple(complex(z) for z in np.asarray(eigenvalues).ravel())
    re = np.array([z.real for z in eig])
    margin = float(re.max())
    real_eigs = [z.real for z in eig if abs(z.imag) <= margin_tol * max(1.0, abs(z.real))]
    if abs(margin) <= margin_tol:
        cls = StabilityClass.MARGINAL
    elif margin < -margin_tol:
        cls = StabilityClass.ASYMPTOTICALLY_STABLE
    elif any(x > margin_tol for x in real_eigs) and any(x < -margin_tol for x in real_eigs):
        cls = StabilityClass.SADDLE
    else:
        cls = StabilityClass.UNSTABLE
    return StabilityVerdict(eig, cls, margin)


def classify(params: PursuitParams, eq: Equilibrium, n: int = 1,
             margin_tol: float = MARGIN_TOL) -> StabilityVerdict:
    """Linearise the ``n``-evader system at ``eq`` and classify it."""
    J = coupled_jacobian(params, eq, n)
    return classify_eigenvalues(np.linalg.eigvals(J), margin_tol)
