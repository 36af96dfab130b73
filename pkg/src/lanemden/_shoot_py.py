"""Pure-Python twin of the compiled ``_shoot`` kernels.

Same algorithm, same constants, same call signatures; used when the
extension is unavailable or ``LANEMDEN_BACKEND=python`` is set.
"""

from math import cos, exp, sin, sqrt

import numpy as np

A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
A61, A62, A63 = 9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0
A64, A65 = 49.0 / 176.0, -5103.0 / 18656.0
B1, B3, B4, B5, B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
E1, E3, E4 = 71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0
E5, E6, E7 = -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0
C2, C3, C4, C5 = 0.2, 0.3, 0.8, 8.0 / 9.0

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0

STATUS_OK = 0
STATUS_HORIZON = 1
STATUS_UNDERFLOW = 2


class _System:
    __slots__ = ("n", "p", "c0", "c1", "rtol", "atol", "hmax")

    def __init__(self, n, p, c0, c1, rtol, atol, hmax):
        self.n = n
        self.p = p
        self.c0 = c0
        self.c1 = c1
        self.rtol = rtol
        self.atol = atol
        self.hmax = hmax


def _rhs(s, t, y):
    e2t = exp(2.0 * t)
    aw = abs(y[0])
    pw = aw ** (s.p - 1.0) if aw > 0.0 else 0.0
    if s.n == 2:
        return [y[1], -e2t * pw * y[0]]
    q = s.p * e2t * pw + s.c0 + s.c1 * e2t
    sn = sin(y[2])
    cs = cos(y[2])
    return [y[1], -e2t * pw * y[0], cs * cs + q * sn * sn, (1.0 - q) * sn * cs]


def _attempt(s, t, h, y, k1):
    rn = range(s.n)
    k2 = _rhs(s, t + C2 * h, [y[i] + h * A21 * k1[i] for i in rn])
    k3 = _rhs(s, t + C3 * h, [y[i] + h * (A31 * k1[i] + A32 * k2[i]) for i in rn])
    k4 = _rhs(s, t + C4 * h,
              [y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]) for i in rn])
    k5 = _rhs(s, t + C5 * h,
              [y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
               for i in rn])
    k6 = _rhs(s, t + h,
              [y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i]
                           + A64 * k4[i] + A65 * k5[i]) for i in rn])
    ynew = [y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i])
            for i in rn]
    k7 = _rhs(s, t + h, ynew)
    err = 0.0
    for i in rn:
        e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i]
                 + E6 * k6[i] + E7 * k7[i])
        sc = s.atol + s.rtol * max(abs(y[i]), abs(ynew[i]))
        err += (e / sc) ** 2
    return sqrt(err / s.n), ynew, k7


def _next_h(h, err, rejected):
    fac = MAX_FACTOR if err == 0.0 else SAFETY * err ** -0.2
    fac = max(fac, MIN_FACTOR)
    if rejected and fac > 1.0:
        fac = 1.0
    elif fac > MAX_FACTOR:
        fac = MAX_FACTOR
    return h * fac


def _advance(s, t, t1, y, k1, h):
    while t < t1:
        hh = min(h, s.hmax)
        rejected = False
        while True:
            if hh < 1e-14 * (1.0 + abs(t)):
                return STATUS_UNDERFLOW, t, y, k1, h
            if t + hh >= t1:
                hh = t1 - t
            err, ynew, k7 = _attempt(s, t, hh, y, k1)
            if err <= 1.0:
                break
            hh = _next_h(hh, err, True)
            rejected = True
        if t + hh >= t1:
            t = t1
        else:
            t = t + hh
            h = _next_h(hh, err, rejected)
        y, k1 = ynew, k7
    return STATUS_OK, t, y, k1, h


def trajectory(p, t0, w0, wt0, t_max, n_zeros, rtol=1e-11, atol=1e-13, h_max=0.1):
    s = _System(2, p, 0.0, 0.0, rtol, atol, h_max)
    y = [w0, wt0]
    k1 = _rhs(s, t0, y)
    t, h = t0, 1e-3
    rows = [(t, y[0], y[1])]
    zeros = 0
    status = STATUS_HORIZON
    while t < t_max:
        hh = min(h, s.hmax)
        rejected = False
        failed = False
        while True:
            if hh < 1e-14 * (1.0 + abs(t)):
                failed = True
                break
            if t + hh > t_max:
                hh = t_max - t
            err, ynew, k7 = _attempt(s, t, hh, y, k1)
            if err <= 1.0:
                break
            hh = _next_h(hh, err, True)
            rejected = True
        if failed:
            status = STATUS_UNDERFLOW
            break
        t = t + hh
        h = _next_h(hh, err, rejected)
        if (ynew[0] > 0.0) != (y[0] > 0.0) or ynew[0] == 0.0:
            zeros += 1
        y, k1 = ynew, k7
        rows.append((t, y[0], y[1]))
        if zeros >= n_zeros:
            status = STATUS_OK
            break
    out = np.array(rows)
    return out[:, 0].copy(), out[:, 1].copy(), out[:, 2].copy(), status


def sample(p, t0, w0, wt0, t_out, rtol=1e-11, atol=1e-13, h_max=0.25):
    tv = np.ascontiguousarray(t_out, dtype=np.float64)
    res = np.empty((tv.shape[0], 2))
    s = _System(2, p, 0.0, 0.0, rtol, atol, h_max)
    y = [w0, wt0]
    k1 = _rhs(s, t0, y)
    t, h = t0, 1e-3
    status = STATUS_OK
    for j, tj in enumerate(tv):
        if tj > t:
            status, t, y, k1, h = _advance(s, t, tj, y, k1, h)
            if status != STATUS_OK:
                break
        res[j] = y
    return res[:, 0].copy(), res[:, 1].copy(), status


def prufer(p, c0, c1, t0, w0, wt0, theta0, t_out, rtol=1e-11, atol=1e-13, h_max=0.25):
    tv = np.ascontiguousarray(t_out, dtype=np.float64)
    res = np.empty((tv.shape[0], 2))
    s = _System(4, p, c0, c1, rtol, atol, h_max)
    y = [w0, wt0, theta0, 0.0]
    k1 = _rhs(s, t0, y)
    t, h = t0, 1e-3
    status = STATUS_OK
    for j, tj in enumerate(tv):
        if tj > t:
            status, t, y, k1, h = _advance(s, t, tj, y, k1, h)
            if status != STATUS_OK:
                break
        res[j] = y[2], y[3]
    return res[:, 0].copy(), res[:, 1].copy(), status
