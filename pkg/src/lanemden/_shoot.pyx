# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled shooting kernels.

All integrations run in the logarithmic radius ``t = log(rho)``, where the
radial Lane-Emden equation reads ``w_tt = -exp(2t) |w|^(p-1) w``.  The
optional Pruefer pair ``(theta, log A)`` follows the linear equation
``h_tt + Q(t) h = 0`` with ``Q = p exp(2t) |w|^(p-1) + c0 + c1 exp(2t)``.

Stepping is Dormand-Prince 5(4) with FSAL.  ``_shoot_py`` mirrors every
function here line for line.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, pow, fabs, sqrt, sin, cos
from libc.stdlib cimport malloc, realloc, free

cnp.import_array()

DEF NMAX = 4

cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0
cdef double A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0
cdef double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0
cdef double B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0
cdef double C2 = 0.2, C3 = 0.3, C4 = 0.8, C5 = 8.0 / 9.0

cdef double SAFETY = 0.9
cdef double MIN_FACTOR = 0.2
cdef double MAX_FACTOR = 10.0

STATUS_OK = 0
STATUS_HORIZON = 1
STATUS_UNDERFLOW = 2


cdef struct System:
    int n
    double p
    double c0
    double c1
    double rtol
    double atol
    double hmax


cdef inline void _rhs(System* s, double t, double* y, double* f) nogil:
    cdef double e2t = exp(2.0 * t)
    cdef double aw = fabs(y[0])
    cdef double pw = pow(aw, s.p - 1.0) if aw > 0.0 else 0.0
    cdef double q, sn, cs
    f[0] = y[1]
    f[1] = -e2t * pw * y[0]
    if s.n == 4:
        q = s.p * e2t * pw + s.c0 + s.c1 * e2t
        sn = sin(y[2])
        cs = cos(y[2])
        f[2] = cs * cs + q * sn * sn
        f[3] = (1.0 - q) * sn * cs


cdef double _attempt(System* s, double t, double h, double* y, double* k1,
                     double* ynew, double* k7) nogil:
    """One trial step; returns the scaled RMS error estimate."""
    cdef double k2[NMAX]
    cdef double k3[NMAX]
    cdef double k4[NMAX]
    cdef double k5[NMAX]
    cdef double k6[NMAX]
    cdef double tmp[NMAX]
    cdef int i
    cdef int n = s.n
    cdef double err = 0.0, e, sc
    for i in range(n):
        tmp[i] = y[i] + h * A21 * k1[i]
    _rhs(s, t + C2 * h, tmp, k2)
    for i in range(n):
        tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i])
    _rhs(s, t + C3 * h, tmp, k3)
    for i in range(n):
        tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
    _rhs(s, t + C4 * h, tmp, k4)
    for i in range(n):
        tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
    _rhs(s, t + C5 * h, tmp, k5)
    for i in range(n):
        tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i]
                             + A64 * k4[i] + A65 * k5[i])
    _rhs(s, t + h, tmp, k6)
    for i in range(n):
        ynew[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i]
                              + B5 * k5[i] + B6 * k6[i])
    _rhs(s, t + h, ynew, k7)
    for i in range(n):
        e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i]
                 + E6 * k6[i] + E7 * k7[i])
        sc = s.atol + s.rtol * (fabs(y[i]) if fabs(y[i]) > fabs(ynew[i]) else fabs(ynew[i]))
        err += (e / sc) * (e / sc)
    return sqrt(err / n)


cdef inline double _next_h(double h, double err, bint rejected) nogil:
    cdef double fac
    if err == 0.0:
        fac = MAX_FACTOR
    else:
        fac = SAFETY * pow(err, -0.2)
    if fac < MIN_FACTOR:
        fac = MIN_FACTOR
    if rejected and fac > 1.0:
        fac = 1.0
    elif fac > MAX_FACTOR:
        fac = MAX_FACTOR
    return h * fac


cdef int _advance(System* s, double* t, double t1, double* y, double* k1,
                  double* h) nogil:
    """Advance (t, y) to exactly t1.  k1 holds f(t, y) on entry and exit."""
    cdef double ynew[NMAX]
    cdef double k7[NMAX]
    cdef double hh, err
    cdef int i
    cdef bint rejected
    while t[0] < t1:
        hh = h[0]
        if hh > s.hmax:
            hh = s.hmax
        rejected = False
        while True:
            if hh < 1e-14 * (1.0 + fabs(t[0])):
                return 2
            if t[0] + hh >= t1:
                hh = t1 - t[0]
            err = _attempt(s, t[0], hh, y, k1, ynew, k7)
            if err <= 1.0:
                break
            hh = _next_h(hh, err, True)
            rejected = True
        if t[0] + hh >= t1:
            t[0] = t1
        else:
            t[0] = t[0] + hh
            h[0] = _next_h(hh, err, rejected)
        for i in range(s.n):
            y[i] = ynew[i]
            k1[i] = k7[i]
    return 0


def trajectory(double p, double t0, double w0, double wt0, double t_max,
               int n_zeros, double rtol=1e-11, double atol=1e-13,
               double h_max=0.1):
    """Accepted steps of the Lane-Emden shot until the ``n_zeros``-th sign change.

    Returns ``(t, w, wt, status)``; the last entry is the first accepted step
    past the final sign change (status 0), or the horizon ``t_max`` (status 1).
    """
    cdef System s
    s.n = 2
    s.p = p
    s.c0 = 0.0
    s.c1 = 0.0
    s.rtol = rtol
    s.atol = atol
    s.hmax = h_max
    cdef double y[NMAX]
    cdef double k1[NMAX]
    cdef double ynew[NMAX]
    cdef double k7[NMAX]
    cdef double t = t0, h = 1e-3, hh, err
    cdef int cap = 1024, count = 0, zeros = 0, status = 1, i
    cdef bint rejected
    cdef double* buf = <double*> malloc(3 * cap * sizeof(double))
    y[0] = w0
    y[1] = wt0
    _rhs(&s, t, y, k1)
    buf[0] = t
    buf[1] = y[0]
    buf[2] = y[1]
    count = 1
    with nogil:
        while t < t_max:
            hh = h if h < s.hmax else s.hmax
            rejected = False
            while True:
                if hh < 1e-14 * (1.0 + fabs(t)):
                    status = 2
                    break
                if t + hh > t_max:
                    hh = t_max - t
                err = _attempt(&s, t, hh, y, k1, ynew, k7)
                if err <= 1.0:
                    break
                hh = _next_h(hh, err, True)
                rejected = True
            if status == 2:
                break
            t = t + hh
            h = _next_h(hh, err, rejected)
            if (ynew[0] > 0.0) != (y[0] > 0.0) or ynew[0] == 0.0:
                zeros += 1
            for i in range(2):
                y[i] = ynew[i]
                k1[i] = k7[i]
            if count == cap:
                cap *= 2
                buf = <double*> realloc(buf, 3 * cap * sizeof(double))
            buf[3 * count] = t
            buf[3 * count + 1] = y[0]
            buf[3 * count + 2] = y[1]
            count += 1
            if zeros >= n_zeros:
                status = 0
                break
    out = np.empty((count, 3))
    cdef double[:, ::1] ov = out
    for i in range(count):
        ov[i, 0] = buf[3 * i]
        ov[i, 1] = buf[3 * i + 1]
        ov[i, 2] = buf[3 * i + 2]
    free(buf)
    return out[:, 0].copy(), out[:, 1].copy(), out[:, 2].copy(), status


def sample(double p, double t0, double w0, double wt0, t_out,
           double rtol=1e-11, double atol=1e-13, double h_max=0.25):
    """Lane-Emden state ``(w, wt)`` at the ascending times ``t_out``."""
    cdef double[::1] tv = np.ascontiguousarray(t_out, dtype=np.float64)
    cdef Py_ssize_t m = tv.shape[0], j
    res = np.empty((m, 2))
    cdef double[:, ::1] rv = res
    cdef System s
    s.n = 2
    s.p = p
    s.c0 = 0.0
    s.c1 = 0.0
    s.rtol = rtol
    s.atol = atol
    s.hmax = h_max
    cdef double y[NMAX]
    cdef double k1[NMAX]
    cdef double t = t0, h = 1e-3
    cdef int status = 0
    y[0] = w0
    y[1] = wt0
    with nogil:
        _rhs(&s, t, y, k1)
        for j in range(m):
            if tv[j] > t:
                status = _advance(&s, &t, tv[j], y, k1, &h)
                if status != 0:
                    break
            rv[j, 0] = y[0]
            rv[j, 1] = y[1]
    return res[:, 0].copy(), res[:, 1].copy(), status


def prufer(double p, double c0, double c1, double t0, double w0, double wt0,
           double theta0, t_out, double rtol=1e-11, double atol=1e-13,
           double h_max=0.25):
    """Pruefer angle and log-amplitude at the ascending times ``t_out``.

    The Lane-Emden state is co-integrated, so ``Q(t)`` is exact to the
    integrator tolerance and needs no interpolation of a stored profile.
    """
    cdef double[::1] tv = np.ascontiguousarray(t_out, dtype=np.float64)
    cdef Py_ssize_t m = tv.shape[0], j
    res = np.empty((m, 2))
    cdef double[:, ::1] rv = res
    cdef System s
    s.n = 4
    s.p = p
    s.c0 = c0
    s.c1 = c1
    s.rtol = rtol
    s.atol = atol
    s.hmax = h_max
    cdef double y[NMAX]
    cdef double k1[NMAX]
    cdef double t = t0, h = 1e-3
    cdef int status = 0
    y[0] = w0
    y[1] = wt0
    y[2] = theta0
    y[3] = 0.0
    with nogil:
        _rhs(&s, t, y, k1)
        for j in range(m):
            if tv[j] > t:
                status = _advance(&s, &t, tv[j], y, k1, &h)
                if status != 0:
                    break
            rv[j, 0] = y[2]
            rv[j, 1] = y[3]
    return res[:, 0].copy(), res[:, 1].copy(), status
