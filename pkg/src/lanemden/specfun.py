"""Bessel functions of the first kind and the Dirichlet spectrum of the unit disk."""

from dataclasses import dataclass
from math import exp, lgamma, log, pi, sqrt

SERIES_SWITCH = 8.0
ZERO_SCAN_STEP = pi / 4
ZERO_XTOL = 1e-14


def _series(n, x):
    # sum_k (-1)^k (x/2)^(2k+n) / (k! (k+n)!)
    half = 0.5 * x
    if half == 0.0:
        return 1.0 if n == 0 else 0.0
    term = exp(n * log(half) - lgamma(n + 1))
    total = term
    q = -half * half
    k = 0
    while True:
        k += 1
        term *= q / (k * (k + n))
        total += term
        # <= so that an underflowed series (term = total = 0) also stops
        if abs(term) <= 1e-17 * abs(total) and k > half:
            return total


def _miller(n, x):
    # backward recurrence normalised by J0 + 2 sum J_2k = 1
    start = 2 * ((max(n, int(x)) + 20 + int(sqrt(40.0 * max(n, x)))) // 2)
    jp1, j = 0.0, 1e-300
    norm = 0.0
    target = 0.0
    for k in range(start, 0, -1):
        jm1 = 2.0 * k / x * j - jp1
        jp1, j = j, jm1
        if k - 1 == n:
            target = j
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j
        if abs(j) > 1e250:
            j *= 1e-250
            jp1 *= 1e-250
            norm *= 1e-250
            target *= 1e-250
    norm += j
    return target / norm


def bessel_j(n, x):
    """J_n(x) for integer n >= 0 and real x >= 0."""
    n = int(n)
    if n < 0:
        raise ValueError("order must be non-negative")
    x = float(x)
    if x < 0:
        raise ValueError("argument must be non-negative")
    if x <= SERIES_SWITCH:
        return _series(n, x)
    return _miller(n, x)


def _bisect(n, a, b):
    fa = bessel_j(n, a)
    while b - a > ZERO_XTOL * max(1.0, a):
        m = 0.5 * (a + b)
        fm = bessel_j(n, m)
        if fm == 0.0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def _zeros_upto(n, count=None, x_max=None):
    zeros = []
    x = float(n) if n > 0 else 0.0
    f = bessel_j(n, x)
    while True:
        if count is not None and len(zeros) >= count:
            return zeros
        if x_max is not None and x > x_max:
            return [z for z in zeros if z <= x_max]
        x_next = x + ZERO_SCAN_STEP
        f_next = bessel_j(n, x_next)
        if f_next == 0.0 or (f > 0) != (f_next > 0):
            zeros.append(x_next if f_next == 0.0 else _bisect(n, x, x_next))
            if f_next == 0.0:
                x_next += 1e-12
                f_next = bessel_j(n, x_next)
        x, f = x_next, f_next


def bessel_zero(n, k):
    """k-th positive zero of J_n (k >= 1)."""
    if k < 1:
        raise ValueError("zero index starts at 1")
    return _zeros_upto(int(n), count=int(k))[-1]


@dataclass(frozen=True)
class DiskMode:
    n: int
    k: int
    nu: float
    multiplicity: int

    @property
    def lam(self):
        return self.nu * self.nu


@dataclass(frozen=True)
class DiskEigenstructure:
    """Dirichlet eigenvalues of -Laplace on the unit disk, ascending.

    Each (n, k) pair appears once; ``multiplicity`` is 2 for the cos/sin
    pair when n >= 1.
    """

    entries: tuple
    count: int

    def eigenvalues(self):
        """Eigenvalues repeated by multiplicity, truncated to ``count``."""
        out = []
        for e in self.entries:
            out.extend([e.lam] * e.multiplicity)
        return out[: self.count]

    def count_below(self, lam):
        return sum(e.multiplicity for e in self.entries if e.lam < lam)

    def find(self, n, k):
        for e in self.entries:
            if e.n == n and e.k == k:
                return e
        raise KeyError((n, k))


def disk_eigenstructure(count):
    """First ``count`` disk eigenvalues (with multiplicity) and their modes."""
    if not 1 <= count <= 200:
        raise ValueError("count must lie in [1, 200]")
    # Weyl: N(lambda) ~ lambda / 4
    nu_max = sqrt(4.0 * count) + 6.0
    while True:
        modes = []
        n = 0
        while n <= nu_max:
            for k, z in enumerate(_zeros_upto(n, x_max=nu_max), start=1):
                modes.append(DiskMode(n, k, z, 1 if n == 0 else 2))
            n += 1
        modes.sort(key=lambda m: (m.nu, m.n))
        total = 0
        kept = []
        for m in modes:
            if total >= count:
                break
            kept.append(m)
            total += m.multiplicity
        # modes past nu_max could still undercut the last kept one
        if total >= count and kept[-1].nu < nu_max - ZERO_SCAN_STEP:
            return DiskEigenstructure(tuple(kept), count)
        nu_max = 1.5 * nu_max


def lambda_2rad():
    """Second radial Dirichlet eigenvalue of the disk, nu_02^2."""
    z = bessel_zero(0, 2)
    return z * z

