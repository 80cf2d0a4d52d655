"""Right-hand sides of the coupled pursuer/evader system in every frame.

State vectors are flat arrays of ``2n`` reals, one pair per evader, with
evader 0 first.  Evader 0 drives the pursuer radius ``R exp(k1 (r0 - kappa))``
for every evader, so its own derivative never depends on the others.

The pursuer is not a state: its position is recomputed from ``(t, r0)`` at
each evaluation.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .errors import DomainError, SingularityError
from .model import FixedCartesian, Frame, PursuitParams

__all__ = [
    "D_MIN",
    "evader_rhs_fixed",
    "pursuer_radius",
    "pursuer_position",
    "rhs_rotating_polar",
    "rhs_rotating_cartesian",
    "rhs_fixed_polar",
    "rhs_fixed_cartesian",
    "make_rhs",
]

#: Pursuer-evader distance at or below which the model is declared singular.
D_MIN = 1e-9


def _pairs(s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if s.ndim != 1 or s.size == 0 or s.size % 2:
        raise ValueError(f"state must be a flat array of 2n values, got shape {s.shape}")
    return s.reshape(-1, 2)


def _guard(d2: np.ndarray, d_min: float) -> None:
    bad = np.flatnonzero(~(d2 > d_min * d_min))
    if bad.size:
        i = int(bad[0])
        raise SingularityError(i, math.sqrt(max(float(d2[i]), 0.0)))


def _check_radii(r: np.ndarray) -> None:
    bad = np.flatnonzero(~(r > 0))
    if bad.size:
        i = int(bad[0])
        raise DomainError(f"evader {i} has non-positive radius {r[i]!r}", index=i)


def evader_rhs_fixed(e, p, k: float, d_min: float = D_MIN) -> np.ndarray:
    """Velocity of an evader at ``e`` repelled by a pursuer at ``p``.

    Magnitude ``k / d^2``, directed from the pursuer to the evader.
    """
    diff = np.asarray(e, dtype=float) - np.asarray(p, dtype=float)
    d = math.hypot(diff[0], diff[1])
    if not d > d_min:
        raise SingularityError(0, d)
    return k * diff / d ** 3


def pursuer_radius(r0, params: PursuitParams):
    """``R exp(k1 (r0 - kappa))``; constant ``R`` in circular mode."""
    if params.k1 == 0:
        return params.R if np.ndim(r0) == 0 else np.full(np.shape(r0), params.R)
    return params.R * np.exp(params.k1 * (np.asarray(r0, dtype=float) - params.kappa))


def pursuer_position(t: float, r0: float, params: PursuitParams) -> FixedCartesian:
    if r0 < 0:
        raise DomainError(f"r0 must be >= 0, got {r0!r}")
    rp = float(pursuer_radius(r0, params))
    return FixedCartesian(rp * math.cos(params.omega * t), rp * math.sin(params.omega * t))


def rhs_rotating_polar(s, params: PursuitParams, d_min: float = D_MIN) -> np.ndarray:
    """Time-invariant ``(r_i, psi_i)`` dynamics in the co-rotating frame."""
    q = _pairs(s)
    r, psi = q[:, 0], q[:, 1]
    _check_radii(r)
    rp = pursuer_radius(r[0], params)
    c, sn = np.cos(psi), np.sin(psi)
    du = r * c - rp
    dv = r * sn
    d2 = du * du + dv * dv
    _guard(d2, d_min)
    d3 = d2 * np.sqrt(d2)
    out = np.empty_like(q)
    out[:, 0] = params.k * (r - rp * c) / d3
    out[:, 1] = params.k * rp * sn / (r * d3) - params.omega
    return out.reshape(-1)


def rhs_rotating_cartesian(s, params: PursuitParams, d_min: float = D_MIN) -> np.ndarray:
    """``(u_i, v_i)`` dynamics in the co-rotating Cartesian frame."""
    q = _pairs(s)
    u, v = q[:, 0], q[:, 1]
    rp = pursuer_radius(math.hypot(u[0], v[0]), params)
    du = u - rp
    d2 = du * du + v * v
    _guard(d2, d_min)
    d3 = d2 * np.sqrt(d2)
    out = np.empty_like(q)
    out[:, 0] = params.k * du / d3 + params.omega * v
    out[:, 1] = params.k * v / d3 - params.omega * u
    return out.reshape(-1)


def rhs_fixed_polar(s, t: float, params: PursuitParams, d_min: float = D_MIN) -> np.ndarray:
    """Time-varying ``(r_i, phi_i)`` dynamics in the fixed frame."""
    q = _pairs(s)
    r, phi = q[:, 0], q[:, 1]
    _check_radii(r)
    rp = pursuer_radius(r[0], params)
    rel = phi - params.omega * t
    c, sn = np.cos(rel), np.sin(rel)
    du = r * c - rp
    dv = r * sn
    d2 = du * du + dv * dv
    _guard(d2, d_min)
    d3 = d2 * np.sqrt(d2)
    out = np.empty_like(q)
    out[:, 0] = params.k * (r - rp * c) / d3
    out[:, 1] = params.k * rp * sn / (r * d3)
    return out.reshape(-1)


def rhs_fixed_cartesian(s, t: float, params: PursuitParams, d_min: float = D_MIN) -> np.ndarray:
    """Inverse-square repulsion from the pursuer, all in the fixed frame."""
    q = _pairs(s)
    x, y = q[:, 0], q[:, 1]
    rp = pursuer_radius(math.hypot(x[0], y[0]), params)
    wt = params.omega * t
    dx = x - rp * math.cos(wt)
    dy = y - rp * math.sin(wt)
    d2 = dx * dx + dy * dy
    _guard(d2, d_min)
    d3 = d2 * np.sqrt(d2)
    out = np.empty_like(q)
    out[:, 0] = params.k * dx / d3
    out[:, 1] = params.k * dy / d3
    return out.reshape(-1)


def make_rhs(params: PursuitParams, frame: Frame, d_min: float = D_MIN) -> Callable:
    """Return ``f(t, s)`` for the requested frame (``t`` ignored when autonomous)."""
    frame = Frame(frame)
    if frame is Frame.ROTATING_POLAR:
        return lambda t, s: rhs_rotating_polar(s, params, d_min)
    if frame is Frame.ROTATING_CARTESIAN:
        return lambda t, s: rhs_rotating_cartesian(s, params, d_min)
    if frame is Frame.FIXED_POLAR:
        return lambda t, s: rhs_fixed_polar(s, t, params, d_min)
    return lambda t, s: rhs_fixed_cartesian(s, t, params, d_min)
