# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled RK4 kernels for the covariance and propagator equations.

The state layouts and the arithmetic mirror :mod:`hotent._kernels_py`
statement by statement so that both back ends agree to rounding level.

Covariance state (21 doubles)::

    y[0:10]   packed covariance   (xx11, xx22, xx12, xp11, xp22, x1p2, x2p1, pp11, pp22, pp12)
    y[10:20]  packed inverse covariance K, same ordering
    y[20]     ln det sigma

Parameter vector (9 doubles)::

    (m, omega, gamma1, gamma2, noise1, noise2, c0, c1, omega_d)

with ``noise_i = 4 m gamma_i / beta_bath_i``.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, fabs, isfinite

cnp.import_array()

cdef enum:
    NCOV = 21
    NPROP = 16


cdef inline void _cov_rhs(double t, const double* y, double* dy, const double* p) noexcept nogil:
    cdef double m = p[0]
    cdef double w2 = p[1] * p[1]
    cdef double g1 = p[2]
    cdef double g2 = p[3]
    cdef double n1 = p[4]
    cdef double n2 = p[5]
    cdef double s = p[6] + p[7] * cos(p[8] * t)
    cdef double im = 1.0 / m
    cdef double mw2 = m * w2
    cdef double ms = m * s
    # covariance, explicit component form
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

    # inverse covariance: dK/dt = -(K W + (K W)^T) - K N K
    cdef double K[4][4]
    cdef double M[4][4]
    cdef int i, j
    K[0][0] = y[10]
    K[1][1] = y[11]
    K[0][1] = y[12]; K[1][0] = y[12]
    K[0][2] = y[13]; K[2][0] = y[13]
    K[1][3] = y[14]; K[3][1] = y[14]
    K[0][3] = y[15]; K[3][0] = y[15]
    K[1][2] = y[16]; K[2][1] = y[16]
    K[2][2] = y[17]
    K[3][3] = y[18]
    K[2][3] = y[19]; K[3][2] = y[19]
    cdef double d1 = -2.0 * g1
    cdef double d2 = -2.0 * g2
    for i in range(4):
        M[i][0] = -mw2 * K[i][2] - ms * K[i][3]
        M[i][1] = -ms * K[i][2] - mw2 * K[i][3]
        M[i][2] = im * K[i][0] + d1 * K[i][2]
        M[i][3] = im * K[i][1] + d2 * K[i][3]
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
    # ln det sigma: 2 tr W + tr(K N)
    dy[20] = 2.0 * (d1 + d2) + n1 * K[2][2] + n2 * K[3][3]


cdef inline void _prop_rhs(double t, const double* y, double* dy, const double* p) noexcept nogil:
    cdef double m = p[0]
    cdef double w2 = p[1] * p[1]
    cdef double s = p[6] + p[7] * cos(p[8] * t)
    cdef double im = 1.0 / m
    cdef double b = -m * w2
    cdef double c = -m * s
    cdef double d1 = -2.0 * p[2]
    cdef double d2 = -2.0 * p[3]
    cdef int j
    for j in range(4):
        dy[j] = im * y[8 + j]
        dy[4 + j] = im * y[12 + j]
        dy[8 + j] = b * y[j] + c * y[4 + j] + d1 * y[8 + j]
        dy[12 + j] = c * y[j] + b * y[4 + j] + d2 * y[12 + j]


cdef int _rk4(void (*f)(double, const double*, double*, const double*) noexcept nogil,
              int n, double* y, const double* p, double t0, double dt,
              long n_steps, long stride, double guard, int n_guard,
              double* out_t, double* out_y, long* n_done, long* n_samples) noexcept nogil:
    """Shared fixed-step RK4 loop.

    Returns 0 on success, 1 when ``|y[k]| > guard`` for some ``k < n_guard``,
    2 when a non-finite value appears.
    """
    cdef double k1[NCOV]
    cdef double k2[NCOV]
    cdef double k3[NCOV]
    cdef double k4[NCOV]
    cdef double tmp[NCOV]
    cdef long step, ns = 0
    cdef int i, status = 0
    cdef double t, h2 = 0.5 * dt
    for i in range(n):
        out_y[i] = y[i]
    out_t[0] = t0
    ns = 1
    step = 0
    while step < n_steps:
        t = t0 + step * dt
        f(t, y, k1, p)
        for i in range(n):
            tmp[i] = y[i] + h2 * k1[i]
        f(t + h2, tmp, k2, p)
        for i in range(n):
            tmp[i] = y[i] + h2 * k2[i]
        f(t + h2, tmp, k3, p)
        for i in range(n):
            tmp[i] = y[i] + dt * k3[i]
        f(t + dt, tmp, k4, p)
        for i in range(n):
            y[i] = y[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        step += 1
        for i in range(n):
            if not isfinite(y[i]):
                status = 2
        if status == 0:
            for i in range(n_guard):
                if fabs(y[i]) > guard:
                    status = 1
        if status == 0 and (step % stride == 0 or step == n_steps):
            out_t[ns] = t0 + step * dt
            for i in range(n):
                out_y[ns * n + i] = y[i]
            ns += 1
        if status != 0:
            break
    n_done[0] = step
    n_samples[0] = ns
    return status


def _run(int kind, double[::1] y0, double[::1] params, double t0, double dt,
         long n_steps, long stride, double guard):
    cdef int n = NCOV if kind == 0 else NPROP
    if y0.shape[0] != n:
        raise ValueError("state vector has length %d, expected %d" % (y0.shape[0], n))
    if params.shape[0] != 9:
        raise ValueError("parameter vector must have length 9")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    cdef long max_samples = n_steps // stride + 2
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_t = np.empty(max_samples)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out_y = np.empty((max_samples, n))
    cdef double y[NCOV]
    cdef double p[9]
    cdef int i, status
    cdef long n_done = 0, n_samples = 0
    for i in range(n):
        y[i] = y0[i]
    for i in range(9):
        p[i] = params[i]
    cdef double* pt = <double*> cnp.PyArray_DATA(out_t)
    cdef double* py = <double*> cnp.PyArray_DATA(out_y)
    with nogil:
        if kind == 0:
            status = _rk4(_cov_rhs, n, y, p, t0, dt, n_steps, stride, guard, 10,
                          pt, py, &n_done, &n_samples)
        else:
            status = _rk4(_prop_rhs, n, y, p, t0, dt, n_steps, stride, guard, 16,
                          pt, py, &n_done, &n_samples)
    last = np.array([y[i] for i in range(n)])
    return out_t[:n_samples].copy(), out_y[:n_samples].copy(), int(n_done), int(status), last


def integrate_covariance(y0, params, double t0, double dt, long n_steps, long stride,
                         double guard):
    """RK4-integrate the 21-component covariance state.

    Returns ``(times, samples, n_done, status, last_state)``.
    """
    return _run(0, np.ascontiguousarray(y0, dtype=np.float64),
                np.ascontiguousarray(params, dtype=np.float64), t0, dt, n_steps, stride, guard)


def integrate_propagator(y0, params, double t0, double dt, long n_steps, long stride,
                         double guard):
    """RK4-integrate the 16-component propagator state (row-major 4x4)."""
    return _run(1, np.ascontiguousarray(y0, dtype=np.float64),
                np.ascontiguousarray(params, dtype=np.float64), t0, dt, n_steps, stride, guard)


def covariance_rhs(double t, y, params):
    """Evaluate the 21-component right-hand side once (used by tests)."""
    cdef double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef double[::1] pv = np.ascontiguousarray(params, dtype=np.float64)
    cdef double dy[NCOV]
    _cov_rhs(t, &yv[0], dy, &pv[0])
    return np.array([dy[i] for i in range(NCOV)])


def propagator_rhs(double t, y, params):
    """Evaluate the 16-component propagator right-hand side once."""
    cdef double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef double[::1] pv = np.ascontiguousarray(params, dtype=np.float64)
    cdef double dy[NPROP]
    _prop_rhs(t, &yv[0], dy, &pv[0])
    return np.array([dy[i] for i in range(NPROP)])
