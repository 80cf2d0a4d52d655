"""Domain types, parameter admissibility, and coordinate-frame conversions.

Four frames are used throughout the package, all centred on the target
point:

* fixed Cartesian ``(x, y)`` and its polar form ``(r, phi)``;
* the rotating Cartesian frame ``(u, v)`` whose ``u`` axis passes through
  the pursuer, turning at the constant rate ``omega``, and its polar form
  ``(r, psi)`` with ``psi = phi - omega * t``.

Angles are always normalised to ``(-pi, pi]``.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ValidationError

__all__ = [
    "Mode",
    "Frame",
    "PursuitParams",
    "FixedCartesian",
    "FixedPolar",
    "RotatingCartesian",
    "RotatingPolar",
    "SwarmState",
    "AdmissibilityReport",
    "CIRCULAR_RATIO_BOUND",
    "wrap_angle",
    "to_rotating",
    "from_rotating",
    "polar_cartesian",
    "check_admissibility",
    "spiral_kappa_bound",
    "convert_states",
]

#: Upper bound on k / (omega R^3) for circular pursuit to admit equilibria.
CIRCULAR_RATIO_BOUND = 2.0 / (3.0 * math.sqrt(3.0))


class Mode(str, enum.Enum):
    SPIRAL = "spiral"
    CIRCULAR = "circular"


class Frame(str, enum.Enum):
    FIXED_CARTESIAN = "fixed_cartesian"
    FIXED_POLAR = "fixed_polar"
    ROTATING_CARTESIAN = "rotating_cartesian"
    ROTATING_POLAR = "rotating_polar"

    @property
    def rotating(self) -> bool:
        return self in (Frame.ROTATING_CARTESIAN, Frame.ROTATING_POLAR)

    @property
    def polar(self) -> bool:
        return self in (Frame.FIXED_POLAR, Frame.ROTATING_POLAR)


@dataclass(frozen=True)
class PursuitParams:
    """Parameters of the pursuer law.

    Parameters
    ----------
    k : float
        Repulsion strength (length^3 / time).
    k1 : float
        Radial feedback gain; ``0`` selects circular pursuit.
    R : float
        Initial pursuer radius.
    omega : float
        Pursuer angular velocity.
    kappa : float
        Initial radius of the farthest evader (evader 0).
    mode : Mode, optional
        Derived from ``k1`` when omitted.
    """

    k: float
    k1: float
    R: float
    omega: float
    kappa: float
    mode: Mode | None = None

    def __post_init__(self) -> None:
        for name in ("k", "R", "omega", "kappa"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValidationError(name, "must be > 0")
        if not (math.isfinite(self.k1) and self.k1 >= 0):
            raise ValidationError("k1", "must be >= 0")
        mode = self.mode
        if mode is None:
            mode = Mode.CIRCULAR if self.k1 == 0 else Mode.SPIRAL
        mode = Mode(mode)
        if mode is Mode.CIRCULAR and self.k1 != 0:
            raise ValidationError("k1", "circular mode requires k1 = 0")
        if mode is Mode.SPIRAL and self.k1 == 0:
            raise ValidationError("k1", "spiral mode requires k1 > 0")
        object.__setattr__(self, "mode", mode)

    @classmethod
    def circular(cls, k: float, R: float, omega: float, kappa: float = 1.0) -> "PursuitParams":
        return cls(k=k, k1=0.0, R=R, omega=omega, kappa=kappa, mode=Mode.CIRCULAR)

    def replace(self, **changes) -> "PursuitParams":
        if "k1" in changes and "mode" not in changes:
            changes["mode"] = None
        return dataclasses.replace(self, **changes)

    @property
    def period(self) -> float:
        """One revolution of the pursuer."""
        return 2.0 * math.pi / self.omega

    def as_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "k": self.k,
            "k1": self.k1,
            "R": self.R,
            "omega": self.omega,
            "kappa": self.kappa,
        }


class FixedCartesian(NamedTuple):
    x: float
    y: float


class FixedPolar(NamedTuple):
    r: float
    phi: float


class RotatingCartesian(NamedTuple):
    u: float
    v: float


class RotatingPolar(NamedTuple):
    r: float
    psi: float


_POLAR_TO_CARTESIAN = {FixedPolar: FixedCartesian, RotatingPolar: RotatingCartesian}
_CARTESIAN_TO_POLAR = {FixedCartesian: FixedPolar, RotatingCartesian: RotatingPolar}
_FRAME_OF = {
    FixedCartesian: Frame.FIXED_CARTESIAN,
    FixedPolar: Frame.FIXED_POLAR,
    RotatingCartesian: Frame.ROTATING_CARTESIAN,
    RotatingPolar: Frame.ROTATING_POLAR,
}


@dataclass(frozen=True)
class SwarmState:
    """Positions of all evaders at time ``t``; index 0 is the kappa-defining evader."""

    t: float
    evaders: tuple
    frame: Frame

    def __post_init__(self) -> None:
        if not self.evaders:
            raise ValidationError("evaders", "at least one evader is required")
        object.__setattr__(self, "evaders", tuple(self.evaders))

    @classmethod
    def from_points(cls, points: Sequence, t: float = 0.0) -> "SwarmState":
        points = tuple(points)
        kinds = {type(p) for p in points}
        if len(kinds) != 1 or next(iter(kinds)) not in _FRAME_OF:
            raise ValidationError("evaders", "points must share one frame type")
        return cls(t=t, evaders=points, frame=_FRAME_OF[next(iter(kinds))])

    @property
    def n(self) -> int:
        return len(self.evaders)

    def as_vector(self) -> np.ndarray:
        """Flat ``(a0, b0, a1, b1, ...)`` layout used by the dynamics."""
        return np.asarray(self.evaders, dtype=float).reshape(-1)


@dataclass(frozen=True)
class AdmissibilityReport:
    spiral_ok: bool
    kappa_bound: float | None
    circular_ok: bool
    ratio: float


def wrap_angle(a):
    """Map angles to ``(-pi, pi]``; works on scalars and arrays."""
    wrapped = np.pi - np.mod(np.pi - np.asarray(a, dtype=float), 2.0 * np.pi)
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped


def to_rotating(p: FixedCartesian, t: float, omega: float) -> RotatingCartesian:
    c, s = math.cos(omega * t), math.sin(omega * t)
    x, y = p
    return RotatingCartesian(x * c + y * s, -x * s + y * c)


def from_rotating(q: RotatingCartesian, t: float, omega: float) -> FixedCartesian:
    c, s = math.cos(omega * t), math.sin(omega * t)
    u, v = q
    return FixedCartesian(u * c - v * s, u * s + v * c)


def polar_cartesian(p):
    """Convert a point between polar and Cartesian form within its frame.

    Polar inputs (:class:`FixedPolar`, :class:`RotatingPolar`) map to the
    Cartesian type of the same frame and vice versa.  The origin maps to
    ``r = 0`` with angle ``0``.
    """
    kind = type(p)
    if kind in _POLAR_TO_CARTESIAN:
        r, a = p
        if r < 0:
            raise ValidationError("r", "must be >= 0")
        return _POLAR_TO_CARTESIAN[kind](r * math.cos(a), r * math.sin(a))
    if kind in _CARTESIAN_TO_POLAR:
        a, b = p
        if a == 0.0 and b == 0.0:
            return _CARTESIAN_TO_POLAR[kind](0.0, 0.0)
        return _CARTESIAN_TO_POLAR[kind](math.hypot(a, b), wrap_angle(math.atan2(b, a)))
    raise TypeError(f"unsupported point type {kind.__name__}")


def spiral_kappa_bound(k1: float, R: float) -> float | None:
    """``ln(2 k1^2 R^2) / (2 k1)``, or ``None`` when ``2 k1^2 R^2 <= 1``."""
    g = 2.0 * k1 * k1 * R * R
    if k1 <= 0 or g <= 1.0:
        return None
    return math.log(g) / (2.0 * k1)


def check_admissibility(params: PursuitParams) -> AdmissibilityReport:
    bound = spiral_kappa_bound(params.k1, params.R)
    spiral_ok = bound is not None and params.kappa < bound
    ratio = params.k / (params.omega * params.R ** 3)
    circular_ok = 0.0 < ratio < CIRCULAR_RATIO_BOUND
    return AdmissibilityReport(
        spiral_ok=spiral_ok, kappa_bound=bound, circular_ok=circular_ok, ratio=ratio
    )


def convert_states(states, t, omega: float, src: Frame, dst: Frame) -> np.ndarray:
    """Convert sampled states of shape ``(m, 2n)`` (or ``(2n,)``) between frames.

    ``t`` holds the sample times (scalar or length ``m``).  Polar outputs use
    wrapped angles; the origin maps to angle 0.
    """
    src, dst = Frame(src), Frame(dst)
    arr = np.asarray(states, dtype=float)
    single = arr.ndim == 1
    q = np.atleast_2d(arr).reshape(arr.shape[0] if not single else 1, -1, 2)
    tt = np.broadcast_to(np.asarray(t, dtype=float), (q.shape[0],))[:, None]
    a, b = q[..., 0], q[..., 1]
    if src.polar:
        a, b = a * np.cos(b), a * np.sin(b)
    if src.rotating != dst.rotating:
        theta = omega * tt if dst.rotating else -omega * tt
        c, s_ = np.cos(theta), np.sin(theta)
        a, b = a * c + b * s_, -a * s_ + b * c
    if dst.polar:
        r = np.sqrt(a * a + b * b)
        ang = np.where(r > 0, np.arctan2(b, a), 0.0)
        a, b = r, wrap_angle(ang)
    out = np.stack([a, b], axis=-1).reshape(q.shape[0], -1)
    return out[0] if single else out
