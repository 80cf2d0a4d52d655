"""Deterministic ODE integration and convergence detection.

Two routes are provided:

* :func:`integrate` works with any right-hand side ``f(t, s)`` (classical
  RK4 or adaptive RK45) and is used for the fixed frames and for checks;
* :func:`simulate` runs the rotating Cartesian herding system through the
  RK4 kernel from :mod:`herdlab.kernels` (compiled when available), with
  optional early stopping once the state settles on a target.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import RK45

from . import kernels
from .dynamics import D_MIN, make_rhs
from .errors import DomainError, FrameError, ModelError, SingularityError, ValidationError
from .model import Frame, PursuitParams, convert_states, wrap_angle

__all__ = [
    "Termination",
    "IntegratorSettings",
    "Trajectory",
    "ConvergenceReport",
    "integrate",
    "simulate",
    "detect_convergence",
    "default_step",
    "target_pairs",
]


class Termination(str, enum.Enum):
    COMPLETED = "completed"
    CONVERGED = "converged"
    SINGULAR = "singular"
    DOMAIN_ERROR = "domain_error"
    ESCAPED = "escaped"


_KERNEL_STATUS = {
    kernels.COMPLETED: Termination.COMPLETED,
    kernels.CONVERGED: Termination.CONVERGED,
    kernels.SINGULAR: Termination.SINGULAR,
    kernels.ESCAPED: Termination.ESCAPED,
}


def default_step(omega: float) -> float:
    """One thousandth of a pursuer revolution."""
    return 1e-3 * 2.0 * math.pi / omega


@dataclass(frozen=True)
class IntegratorSettings:
    """How to integrate.

    ``step`` defaults to :func:`default_step` for the pursuer's ``omega``;
    ``record_every`` defaults to every step (RK4) or every accepted step
    (RK45).
    """

    t_end: float
    method: str = "rk4"
    step: float | None = None
    record_every: float | None = None
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_step: float = math.inf

    def __post_init__(self) -> None:
        if self.method not in ("rk4", "rk45"):
            raise ValidationError("method", "must be 'rk4' or 'rk45'")
        if not (self.t_end > 0 and math.isfinite(self.t_end)):
            raise ValidationError("t_end", "must be > 0")
        if self.step is not None and not self.step > 0:
            raise ValidationError("step", "must be > 0")
        if self.record_every is not None and not self.record_every > 0:
            raise ValidationError("record_every", "must be > 0")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValidationError("rel_tol", "tolerances must be > 0")
        if not self.max_step > 0:
            raise ValidationError("max_step", "must be > 0")

    def resolved_step(self, omega: float | None = None) -> float:
        if self.step is not None:
            return self.step
        if omega is None:
            raise ValidationError("step", "required when omega is unknown")
        return default_step(omega)

    def schedule(self, omega: float | None = None) -> tuple[float, int, int]:
        """``(h, n_steps, stride)`` for fixed-step integration."""
        h = self.resolved_step(omega)
        n_steps = max(1, int(math.ceil(self.t_end / h - 1e-9)))
        stride = 1 if self.record_every is None else max(1, int(round(self.record_every / h)))
        return h, n_steps, stride


@dataclass
class Trajectory:
    """Time-stamped samples of a ``2n`` state vector in one frame."""

    t: np.ndarray
    states: np.ndarray
    frame: Frame
    termination: Termination = Termination.COMPLETED
    bad_index: int | None = None
    t_stop: float | None = None
    message: str = ""
    params: PursuitParams | None = None
    error: Exception | None = field(default=None, repr=False, compare=False)

    @property
    def n(self) -> int:
        return self.states.shape[1] // 2

    @property
    def span(self) -> float:
        return float(self.t[-1] - self.t[0])

    def evader(self, i: int) -> np.ndarray:
        return self.states[:, 2 * i:2 * i + 2]

    def to_frame(self, frame: Frame, omega: float | None = None) -> "Trajectory":
        frame = Frame(frame)
        if frame.rotating == self.frame.rotating:
            omega = 0.0
        elif omega is None:
            if self.params is None:
                raise ValidationError("omega", "needed to change frames")
            omega = self.params.omega
        states = convert_states(self.states, self.t, omega, self.frame, frame)
        return Trajectory(self.t.copy(), states, frame, self.termination, self.bad_index,
                          self.t_stop, self.message, self.params, self.error)

    def raise_for_termination(self) -> None:
        """Re-raise the model error that stopped the run, if any."""
        if self.error is not None:
            raise self.error


@dataclass(frozen=True)
class ConvergenceReport:
    converged: bool
    t_converged: float | None
    final_error: float
    per_evader_error: tuple = ()


def _record_error(exc: ModelError, t: float) -> tuple[Termination, int | None]:
    exc.t = t
    if isinstance(exc, SingularityError):
        return Termination.SINGULAR, exc.index
    return Termination.DOMAIN_ERROR, getattr(exc, "index", None)


def _rk4(rhs, s0, settings, omega):
    h, n_steps, stride = settings.schedule(omega)
    y = np.array(s0, dtype=float)
    times, samples = [0.0], [y.copy()]
    for i in range(n_steps):
        t = i * h
        try:
            k1 = rhs(t, y)
            k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
            k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
            k4 = rhs(t + h, y + h * k3)
        except (SingularityError, DomainError) as exc:
            return times, samples, exc, t
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if (i + 1) % stride == 0 or i + 1 == n_steps:
            times.append((i + 1) * h)
            samples.append(y.copy())
    return times, samples, None, times[-1]


def _rk45(rhs, s0, settings):
    times, samples = [0.0], [np.array(s0, dtype=float)]
    try:
        solver = RK45(rhs, 0.0, np.array(s0, dtype=float), settings.t_end,
                      rtol=settings.rel_tol, atol=settings.abs_tol, max_step=settings.max_step)
    except (SingularityError, DomainError) as exc:
        return times, samples, exc, 0.0
    every = settings.record_every
    next_index = 1
    while solver.status == "running":
        t_prev = solver.t
        try:
            message = solver.step()
        except (SingularityError, DomainError) as exc:
            return times, samples, exc, t_prev
        if solver.status == "failed":
            raise RuntimeError(f"RK45 failed at t={t_prev}: {message}")
        if every is None:
            times.append(solver.t)
            samples.append(solver.y.copy())
            continue
        dense = solver.dense_output()
        while next_index * every <= solver.t + 1e-12 * every:
            tr = next_index * every
            times.append(tr)
            samples.append(dense(min(tr, solver.t)))
            next_index += 1
    if times[-1] < settings.t_end - 1e-12 * settings.t_end:
        times.append(solver.t)
        samples.append(solver.y.copy())
    return times, samples, None, times[-1]


def integrate(rhs: Callable, s0, settings: IntegratorSettings, *,
              frame: Frame = Frame.ROTATING_POLAR, params: PursuitParams | None = None,
              on_error: str = "record") -> Trajectory:
    """Integrate ``ds/dt = rhs(t, s)`` from ``t = 0`` to ``settings.t_end``.

    Model errors raised by ``rhs`` stop the run.  With ``on_error="record"``
    the partial trajectory is returned with its termination set; with
    ``"raise"`` the error is re-raised carrying the interruption time ``t``.
    """
    omega = params.omega if params is not None else None
    if settings.method == "rk4":
        times, samples, exc, t_stop = _rk4(rhs, s0, settings, omega)
    else:
        times, samples, exc, t_stop = _rk45(rhs, s0, settings)
    traj = Trajectory(np.asarray(times), np.vstack(samples), Frame(frame), t_stop=t_stop,
                      params=params)
    if exc is not None:
        traj.termination, traj.bad_index = _record_error(exc, t_stop)
        traj.message = str(exc)
        traj.error = exc
        if on_error == "raise":
            raise exc
    return traj


def target_pairs(target, n: int) -> np.ndarray:
    """Normalise a target spec into an ``(n, 2)`` array of ``(r*, psi*)``.

    Accepts an object with ``r_star``/``psi_star`` attributes, one
    ``(r, psi)`` pair (shared by all evaders), or one pair per evader.
    """
    if hasattr(target, "r_star"):
        arr = np.array([[target.r_star, target.psi_star]], dtype=float)
    else:
        arr = np.asarray(target, dtype=float).reshape(-1, 2)
    if arr.shape[0] == 1:
        arr = np.repeat(arr, n, axis=0)
    if arr.shape[0] != n:
        raise ValidationError("target", f"expected 1 or {n} (r, psi) pairs")
    return arr


def simulate(params: PursuitParams, s0, settings: IntegratorSettings, *,
             target=None, tol: float = 1e-4, window: float | None = None,
             escape_radius: float | None = None, d_min: float = D_MIN,
             backend: str | None = None) -> Trajectory:
    """Integrate the herding system in the rotating Cartesian frame.

    Parameters
    ----------
    params : PursuitParams
    s0 : array_like
        Initial ``(u0, v0, u1, v1, ...)``; at ``t = 0`` this coincides with
        the fixed ``(x, y)`` frame.
    settings : IntegratorSettings
    target : optional
        ``(r*, psi*)`` target(s); when given the run stops as soon as every
        evader has stayed within ``tol`` of it for ``window`` time units.
    window : float, optional
        Defaults to two pursuer revolutions.
    escape_radius : float, optional
        Stop with ``ESCAPED`` when any evader leaves this disk.
    backend : {"cython", "python"}, optional
        Kernel override (RK4 only).
    """
    s0 = np.asarray(s0, dtype=float).reshape(-1)
    if settings.method != "rk4":
        rhs = make_rhs(params, Frame.ROTATING_CARTESIAN, d_min)
        return integrate(rhs, s0, settings, frame=Frame.ROTATING_CARTESIAN, params=params)
    h, n_steps, stride = settings.schedule(params.omega)
    window = 2.0 * params.period if window is None else window
    tgt = None
    window_steps = 0
    if target is not None:
        tgt = target_pairs(target, s0.size // 2).reshape(-1)
        window_steps = int(math.ceil(window / h - 1e-9))
    kernel = kernels.get_kernel(backend)
    times, samples, status, bad, t_stop = kernel(
        s0, params.k, params.k1, params.R, params.omega, params.kappa, h, n_steps, stride,
        d_min, -1.0 if escape_radius is None else float(escape_radius), tgt, float(tol),
        window_steps,
    )
    traj = Trajectory(times, samples, Frame.ROTATING_CARTESIAN, _KERNEL_STATUS[status],
                      None if bad < 0 else int(bad), float(t_stop), params=params)
    if traj.termination is Termination.SINGULAR:
        exc = SingularityError(traj.bad_index, float("nan"), traj.t_stop)
        traj.message = str(exc)
        traj.error = exc
    elif traj.termination is Termination.ESCAPED:
        traj.message = f"evader {traj.bad_index} left the disk of radius {escape_radius}"
    return traj


def _errors(traj: Trajectory, target) -> np.ndarray:
    """Per-sample, per-evader sup-norm error in ``(r, psi)``: shape ``(m, n)``."""
    if not traj.frame.rotating:
        raise FrameError("convergence is only defined in a rotating frame; limit cycles "
                         "are not fixed points of the fixed-frame dynamics")
    polar = traj if traj.frame is Frame.ROTATING_POLAR else traj.to_frame(Frame.ROTATING_POLAR)
    q = polar.states.reshape(len(polar.t), -1, 2)
    tgt = target_pairs(target, q.shape[1])
    dr = np.abs(q[..., 0] - tgt[:, 0])
    dpsi = np.abs(wrap_angle(q[..., 1] - tgt[:, 1]))
    return np.maximum(dr, dpsi)


def detect_convergence(traj: Trajectory, target, tol: float,
                       window: float | None = None) -> ConvergenceReport:
    """Decide whether every evader has settled on its target.

    Converged means every sample in the trailing ``window`` lies within
    ``tol`` of the target (sup over evaders of ``max(|dr|, |dpsi|)``, with
    ``dpsi`` wrapped).  ``t_converged`` is the first sample time after which
    the condition holds through the end of the trajectory.
    """
    if window is None:
        if traj.params is None:
            raise ValidationError("window", "required when the trajectory has no params")
        window = 2.0 * traj.params.period
    if window > traj.span * (1 + 1e-12) + 1e-12:
        raise ValidationError("window", f"{window} exceeds trajectory span {traj.span}")
    err = _errors(traj, target)
    worst = err.max(axis=1)
    outside = np.flatnonzero(worst > tol)
    if outside.size == 0:
        first_ok = 0
    elif outside[-1] + 1 < len(traj.t):
        first_ok = int(outside[-1]) + 1
    else:
        first_ok = None
    t_end = float(traj.t[-1])
    t_conv = None if first_ok is None else float(traj.t[first_ok])
    tail = traj.t >= t_end - window * (1 + 1e-9)
    final_error = float(worst[tail].max())
    per_evader = tuple(float(e) for e in err[tail].max(axis=0))
    converged = t_conv is not None and t_end - t_conv >= window * (1 - 1e-9)
    return ConvergenceReport(converged, t_conv, final_error, per_evader)
