"""Pure-Python fallback for the RK4 kernels.

Mirrors :mod:`hotent._kernels` statement by statement (same state layout,
same parameter vector, same operation order) so that results agree with the
compiled back end to rounding level.  It is roughly two orders of magnitude
slower and is used when the extension module is unavailable or when
``HOTENT_PURE_PYTHON=1`` is set.
"""
import math

import numpy as np

NCOV = 21
NPROP = 16


def _cov_rhs(t, y, p):
    m, omega, g1, g2, n1, n2 = p[0], p[1], p[2], p[3], p[4], p[5]
    w2 = omega * omega
    s = p[6] + p[7] * math.cos(p[8] * t)
    im = 1.0 / m
    mw2 = m * w2
    ms = m * s
    dy = [0.0] * NCOV
    dy[0] = 2.0 * im * y[3]
    dy[1] = 2.0 * im * y[4]
    dy[2] = im * (y[6] + y[5])
    dy[3] = im * y[7] - 2.0 * g1 * y[3] - mw2 * y[0] - ms * y[2]
    dy[4] = im * y[8] - 2.0 * g2 * y[4] - mw2 * y[1] - ms * y[2]
    dy[5] = im * y[9] - 2.0 * g2 * y[5] - mw2 * y[2] - ms * y[0]
    dy[6] = im * y[9] - 2.0 * g1 * y[6] - mw2 * y[2] - ms * y[1]
    dy[7] = n1 - 4.0 * g1 * y[7] - 2.0 * mw2 * y[3] - 2.0 * ms * y[6]
    dy[8] = n2 - 4.0 * g2 * y[8] - 2.0 * mw2 * y[4] - 2.0 * ms * y[5]
    dy[9] = -2.0 * (g1 + g2) * y[9] - mw2 * (y[6] + y[5]) - ms * (y[3] + y[4])

    k00, k11, k01, k02, k13, k03, k12, k22, k33, k23 = y[10:20]
    K = ((k00, k01, k02, k03),
         (k01, k11, k12, k13),
         (k02, k12, k22, k23),
         (k03, k13, k23, k33))
    d1 = -2.0 * g1
    d2 = -2.0 * g2
    M = [(-mw2 * K[i][2] - ms * K[i][3],
          -ms * K[i][2] - mw2 * K[i][3],
          im * K[i][0] + d1 * K[i][2],
          im * K[i][1] + d2 * K[i][3]) for i in range(4)]
    dy[10] = -2.0 * M[0][0] - n1 * K[0][2] * K[2][0] - n2 * K[0][3] * K[3][0]
    dy[11] = -2.0 * M[1][1] - n1 * K[1][2] * K[2][1] - n2 * K[1][3] * K[3][1]
    dy[12] = -(M[0][1] + M[1][0]) - n1 * K[0][2] * K[2][1] - n2 * K[0][3] * K[3][1]
    dy[13] = -(M[0][2] + M[2][0]) - n1 * K[0][2] * K[2][2] - n2 * K[0][3] * K[3][2]
    dy[14] = -(M[1][3] + M[3][1]) - n1 * K[1][2] * K[2][3] - n2 * K[1][3] * K[3][3]
    dy[15] = -(M[0][3] + M[3][0]) - n1 * K[0][2] * K[2][3] - n2 * K[0][3] * K[3][3]
    dy[16] = -(M[1][2] + M[2][1]) - n1 * K[1][2] * K[2][2] - n2 * K[1][3] * K[3][2]
    dy[17] = -2.0 * M[2][2] - n1 * K[2][2] * K[2][2] - n2 * K[2][3] * K[3][2]
    dy[18] = -2.0 * M[3][3] - n1 * K[3][2] * K[2][3] - n2 * K[3][3] * K[3][3]
    dy[19] = -(M[2][3] + M[3][2]) - n1 * K[2][2] * K[2][3] - n2 * K[2][3] * K[3][3]
    dy[20] = 2.0 * (d1 + d2) + n1 * K[2][2] + n2 * K[3][3]
    return dy


def _prop_rhs(t, y, p):
    m = p[0]
    w2 = p[1] * p[1]
    s = p[6] + p[7] * math.cos(p[8] * t)
    im = 1.0 / m
    b = -m * w2
    c = -m * s
    d1 = -2.0 * p[2]
    d2 = -2.0 * p[3]
    dy = [0.0] * NPROP
    for j in range(4):
        dy[j] = im * y[8 + j]
        dy[4 + j] = im * y[12 + j]
        dy[8 + j] = b * y[j] + c * y[4 + j] + d1 * y[8 + j]
        dy[12 + j] = c * y[j] + b * y[4 + j] + d2 * y[12 + j]
    return dy


def _rk4(f, n, y, p, t0, dt, n_steps, stride, guard, n_guard):
    out_t = [t0]
    out_y = [list(y)]
    h2 = 0.5 * dt
    status = 0
    step = 0
    while step < n_steps:
        t = t0 + step * dt
        k1 = f(t, y, p)
        k2 = f(t + h2, [y[i] + h2 * k1[i] for i in range(n)], p)
        k3 = f(t + h2, [y[i] + h2 * k2[i] for i in range(n)], p)
        k4 = f(t + dt, [y[i] + dt * k3[i] for i in range(n)], p)
        y = [y[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
             for i in range(n)]
        step += 1
        if not all(math.isfinite(v) for v in y):
            status = 2
        elif any(abs(y[i]) > guard for i in range(n_guard)):
            status = 1
        if status == 0 and (step % stride == 0 or step == n_steps):
            out_t.append(t0 + step * dt)
            out_y.append(list(y))
        if status != 0:
            break
    return (np.array(out_t), np.array(out_y, dtype=float).reshape(len(out_t), n),
            step, status, np.array(y, dtype=float))


def _check(y0, params, n, stride):
    y0 = [float(v) for v in np.asarray(y0, dtype=float).ravel()]
    params = [float(v) for v in np.asarray(params, dtype=float).ravel()]
    if len(y0) != n:
        raise ValueError("state vector has length %d, expected %d" % (len(y0), n))
    if len(params) != 9:
        raise ValueError("parameter vector must have length 9")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    return y0, params


def integrate_covariance(y0, params, t0, dt, n_steps, stride, guard):
    """RK4-integrate the 21-component covariance state.

    Returns ``(times, samples, n_done, status, last_state)``.
    """
    y0, params = _check(y0, params, NCOV, stride)
    return _rk4(_cov_rhs, NCOV, y0, params, float(t0), float(dt), int(n_steps),
                int(stride), float(guard), 10)


def integrate_propagator(y0, params, t0, dt, n_steps, stride, guard):
    """RK4-integrate the 16-component propagator state (row-major 4x4)."""
    y0, params = _check(y0, params, NPROP, stride)
    return _rk4(_prop_rhs, NPROP, y0, params, float(t0), float(dt), int(n_steps),
                int(stride), float(guard), 16)


def covariance_rhs(t, y, params):
    """Evaluate the 21-component right-hand side once (used by tests)."""
    y, params = _check(y, params, NCOV, 1)
    return np.array(_cov_rhs(float(t), y, params))


def propagator_rhs(t, y, params):
    """Evaluate the 16-component propagator right-hand side once."""
    y, params = _check(y, params, NPROP, 1)
    return np.array(_prop_rhs(float(t), y, params))
