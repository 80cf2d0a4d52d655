# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled RK4 kernel for the rotating-frame herding dynamics.

Mirrors ``herdlab._pykernels.rk4_uv`` operation for operation so both
backends produce the same floating-point results.
"""

import numpy as np
from libc.math cimport sqrt, exp, atan2, fmod, fabs, M_PI

cdef enum:
    COMPLETED = 0
    CONVERGED = 1
    SINGULAR = 2
    ESCAPED = 3


cdef inline int _rhs(const double* s, double* out, Py_ssize_t n, double k, double k1,
                     double R, double omega, double kappa, double dmin2) noexcept nogil:
    cdef double r0, rp, du, v, d2, inv
    cdef Py_ssize_t i
    if k1 == 0.0:
        rp = R
    else:
        r0 = sqrt(s[0] * s[0] + s[1] * s[1])
        rp = R * exp(k1 * (r0 - kappa))
    for i in range(n):
        du = s[2 * i] - rp
        v = s[2 * i + 1]
        d2 = du * du + v * v
        if not d2 > dmin2:
            return <int>i
        inv = k / (d2 * sqrt(d2))
        out[2 * i] = du * inv + omega * v
        out[2 * i + 1] = v * inv - omega * s[2 * i]
    return -1


cdef inline double _wrap(double a) noexcept nogil:
    cdef double x = fmod(M_PI - a, 2.0 * M_PI)
    if x < 0.0:
        x += 2.0 * M_PI
    return M_PI - x


cdef inline double _target_error(const double* s, const double* target,
                                 Py_ssize_t n) noexcept nogil:
    cdef double worst = 0.0, r, e
    cdef Py_ssize_t i
    for i in range(n):
        r = sqrt(s[2 * i] * s[2 * i] + s[2 * i + 1] * s[2 * i + 1])
        e = fabs(r - target[2 * i])
        if e > worst:
            worst = e
        e = fabs(_wrap(atan2(s[2 * i + 1], s[2 * i]) - target[2 * i + 1]))
        if e > worst:
            worst = e
    return worst


def rk4_uv(s0, double k, double k1, double R, double omega, double kappa,
           double h, long n_steps, long stride, double d_min, double escape_r,
           target, double tol, long window_steps):
    """Integrate the rotating Cartesian system with classical RK4.

    Returns ``(times, samples, status, bad_index, t_stop)``; see
    :func:`herdlab._pykernels.rk4_uv` for the contract.
    """
    cdef double[::1] y = np.array(s0, dtype=np.float64, copy=True)
    cdef Py_ssize_t dim = y.shape[0]
    cdef Py_ssize_t n = dim // 2
    cdef double[::1] tgt
    cdef bint check = target is not None
    if check:
        tgt = np.ascontiguousarray(target, dtype=np.float64)
    else:
        tgt = np.zeros(dim, dtype=np.float64)
    cdef Py_ssize_t cap = n_steps // stride + 2
    times_arr = np.empty(cap, dtype=np.float64)
    samples_arr = np.empty((cap, dim), dtype=np.float64)
    cdef double[::1] times = times_arr
    cdef double[:, ::1] samples = samples_arr
    work = np.empty((5, dim), dtype=np.float64)
    cdef double[:, ::1] w = work
    cdef double* k_1 = &w[0, 0]
    cdef double* k_2 = &w[1, 0]
    cdef double* k_3 = &w[2, 0]
    cdef double* k_4 = &w[3, 0]
    cdef double* tmp = &w[4, 0]
    cdef double* yp = &y[0]
    cdef double dmin2 = d_min * d_min
    cdef double esc2 = escape_r * escape_r
    cdef double half = 0.5 * h, sixth = h / 6.0
    cdef double t = 0.0, t_stop = 0.0, p2
    cdef long i, start = -1
    cdef Py_ssize_t m = 0, j
    cdef int status = COMPLETED, bad = -1
    cdef bint esc_on = escape_r > 0.0

    with nogil:
        for j in range(dim):
            samples[0, j] = yp[j]
        times[0] = 0.0
        m = 1
        if check and _target_error(yp, &tgt[0], n) <= tol:
            start = 0
            if window_steps <= 0:
                status = CONVERGED
        i = 0
        while status == COMPLETED and i < n_steps:
            bad = _rhs(yp, k_1, n, k, k1, R, omega, kappa, dmin2)
            if bad < 0:
                for j in range(dim):
                    tmp[j] = yp[j] + half * k_1[j]
                bad = _rhs(tmp, k_2, n, k, k1, R, omega, kappa, dmin2)
            if bad < 0:
                for j in range(dim):
                    tmp[j] = yp[j] + half * k_2[j]
                bad = _rhs(tmp, k_3, n, k, k1, R, omega, kappa, dmin2)
            if bad < 0:
                for j in range(dim):
                    tmp[j] = yp[j] + h * k_3[j]
                bad = _rhs(tmp, k_4, n, k, k1, R, omega, kappa, dmin2)
            if bad >= 0:
                status = SINGULAR
                t_stop = i * h
                break
            for j in range(dim):
                yp[j] = yp[j] + sixth * (k_1[j] + 2.0 * k_2[j] + 2.0 * k_3[j] + k_4[j])
            i += 1
            t = i * h
            if esc_on:
                for j in range(n):
                    p2 = yp[2 * j] * yp[2 * j] + yp[2 * j + 1] * yp[2 * j + 1]
                    if p2 > esc2:
                        status = ESCAPED
                        bad = <int>j
                        break
            if status == ESCAPED or i % stride == 0 or i == n_steps:
                for j in range(dim):
                    samples[m, j] = yp[j]
                times[m] = t
                m += 1
                if check and status == COMPLETED:
                    if _target_error(yp, &tgt[0], n) <= tol:
                        if start < 0:
                            start = i
                        if i - start >= window_steps:
                            status = CONVERGED
                    else:
                        start = -1
        if status != SINGULAR:
            t_stop = times[m - 1]
    if status == COMPLETED or status == CONVERGED:
        bad = -1
    return times_arr[:m].copy(), samples_arr[:m].copy(), status, bad, t_stop
