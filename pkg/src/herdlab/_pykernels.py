"""Pure-Python twin of the compiled RK4 kernel.

Kept operation-for-operation identical to ``_ckernels.pyx`` so that the
two backends agree to the last bit on platforms without FMA contraction.
Used whenever the extension is unavailable or ``HERDLAB_PURE_PYTHON`` is set.
"""

from __future__ import annotations

import math

import numpy as np

COMPLETED, CONVERGED, SINGULAR, ESCAPED = 0, 1, 2, 3

_TWO_PI = 2.0 * math.pi


def _rhs(s, out, n, k, k1, R, omega, kappa, dmin2):
    if k1 == 0.0:
        rp = R
    else:
        rp = R * math.exp(k1 * (math.sqrt(s[0] * s[0] + s[1] * s[1]) - kappa))
    for i in range(n):
        u = s[2 * i]
        v = s[2 * i + 1]
        du = u - rp
        d2 = du * du + v * v
        if not d2 > dmin2:
            return i
        inv = k / (d2 * math.sqrt(d2))
        out[2 * i] = du * inv + omega * v
        out[2 * i + 1] = v * inv - omega * u
    return -1


def _wrap(a):
    x = math.fmod(math.pi - a, _TWO_PI)
    if x < 0.0:
        x += _TWO_PI
    return math.pi - x


def _target_error(s, target, n):
    worst = 0.0
    for i in range(n):
        u = s[2 * i]
        v = s[2 * i + 1]
        e = abs(math.sqrt(u * u + v * v) - target[2 * i])
        if e > worst:
            worst = e
        e = abs(_wrap(math.atan2(v, u) - target[2 * i + 1]))
        if e > worst:
            worst = e
    return worst


def rk4_uv(s0, k, k1, R, omega, kappa, h, n_steps, stride, d_min, escape_r,
           target, tol, window_steps):
    """Integrate the rotating Cartesian system with classical RK4.

    Parameters
    ----------
    s0 : array_like
        Initial ``(u0, v0, u1, v1, ...)``.
    k, k1, R, omega, kappa : float
        Pursuit parameters.
    h : float
        Step size; sample times are exactly ``i * h``.
    n_steps, stride : int
        Number of steps; a sample is stored every ``stride`` steps and at
        the final step.
    d_min : float
        Singularity guard distance.
    escape_r : float
        Stop when any evader leaves the disk of this radius (``<= 0`` disables).
    target : array_like or None
        Per-evader ``(r*, psi*)`` pairs for early convergence stopping.
    tol : float
        Sup-norm tolerance in ``(r, psi)`` for the convergence test.
    window_steps : int
        Steps the state must stay within ``tol`` before stopping.

    Returns
    -------
    times, samples, status, bad_index, t_stop
        ``status`` is one of ``COMPLETED``, ``CONVERGED``, ``SINGULAR``,
        ``ESCAPED``.  ``bad_index`` names the offending evader (or -1);
        ``t_stop`` is the last valid time.
    """
    y = [float(v) for v in np.asarray(s0, dtype=float).reshape(-1)]
    dim = len(y)
    n = dim // 2
    check = target is not None
    tgt = [float(v) for v in np.asarray(target, dtype=float).reshape(-1)] if check else None
    k_1 = [0.0] * dim
    k_2 = [0.0] * dim
    k_3 = [0.0] * dim
    k_4 = [0.0] * dim
    tmp = [0.0] * dim
    dmin2 = d_min * d_min
    esc2 = escape_r * escape_r
    esc_on = escape_r > 0.0
    half = 0.5 * h
    sixth = h / 6.0
    times = [0.0]
    samples = [list(y)]
    status = COMPLETED
    bad = -1
    start = -1
    t_stop = 0.0
    if check and _target_error(y, tgt, n) <= tol:
        start = 0
        if window_steps <= 0:
            status = CONVERGED
    i = 0
    while status == COMPLETED and i < n_steps:
        bad = _rhs(y, k_1, n, k, k1, R, omega, kappa, dmin2)
        if bad < 0:
            for j in range(dim):
                tmp[j] = y[j] + half * k_1[j]
            bad = _rhs(tmp, k_2, n, k, k1, R, omega, kappa, dmin2)
        if bad < 0:
            for j in range(dim):
                tmp[j] = y[j] + half * k_2[j]
            bad = _rhs(tmp, k_3, n, k, k1, R, omega, kappa, dmin2)
        if bad < 0:
            for j in range(dim):
                tmp[j] = y[j] + h * k_3[j]
            bad = _rhs(tmp, k_4, n, k, k1, R, omega, kappa, dmin2)
        if bad >= 0:
            status = SINGULAR
            t_stop = i * h
            break
        for j in range(dim):
            y[j] = y[j] + sixth * (k_1[j] + 2.0 * k_2[j] + 2.0 * k_3[j] + k_4[j])
        i += 1
        t = i * h
        if esc_on:
            for j in range(n):
                if y[2 * j] * y[2 * j] + y[2 * j + 1] * y[2 * j + 1] > esc2:
                    status = ESCAPED
                    bad = j
                    break
        if status == ESCAPED or i % stride == 0 or i == n_steps:
            samples.append(list(y))
            times.append(t)
            if check and status == COMPLETED:
                if _target_error(y, tgt, n) <= tol:
                    if start < 0:
                        start = i
                    if i - start >= window_steps:
                        status = CONVERGED
                else:
                    start = -1
    if status != SINGULAR:
        t_stop = times[-1]
    if status in (COMPLETED, CONVERGED):
        bad = -1
    return (np.asarray(times, dtype=float), np.asarray(samples, dtype=float).reshape(-1, dim),
            status, bad, t_stop)
