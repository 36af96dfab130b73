"""Radial spectra attached to the linearisation of the Lane-Emden problem at u_p.

Three solvers share the log-radius ``t = log r`` in which both problems
become Schrödinger equations ``h_tt + Q(t) h = 0``:

* the singular weighted problem ``-Δψ - p|u_p|^(p-1) ψ = β ψ / |x|^2``,
  radial part ``Q = V(t) + β`` with ``V = p r^2 |u_p|^(p-1)``;
* the mode-k reduction of ``L_p = -Δ - p|u_p|^(p-1)``,
  ``Q = V(t) - k^2 + μ r^2``;
* a finite-difference oracle for the weighted problem on annuli.

The first two are solved by shooting on the Prüfer angle, whose terminal
value is continuous and increasing in the spectral parameter; the number
of eigenvalues below a trial value is ``floor(theta(end) / pi)``.
"""

from dataclasses import dataclass, field
from math import atan2, floor, log, pi, sqrt

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from . import _quad, kernels
from .errors import NoNegativeEigenvalue, StepFailure
from .radial import ATOL, RTOL, series_start

BETA_TOL = 1e-7
MU_TOL = 1e-7
ANNULUS_POINTS = 4096
ANNULUS_REFERENCE = 512
_ROOT_XTOL = 1e-13
_BETA_TOP = -1e-12
DECAY_BUDGET = 60.0


def _shoot(profile, c0, c1, theta0, t_out):
    t0, w0, wt0 = series_start(profile.p, 1.0)
    theta, lnamp, status = kernels.prufer(profile.p, c0, c1, t0, w0, wt0, theta0,
                                          t_out, RTOL, ATOL)
    if status == kernels.STATUS_UNDERFLOW:
        raise StepFailure("step size underflow in Prüfer shot")
    return theta, lnamp


def _terminal_angle(profile, c0, c1, theta0):
    return _terminal_angle_to(profile, c0, c1, theta0, profile.t_end)


def _terminal_angle_to(profile, c0, c1, theta0, t_end):
    theta, _ = _shoot(profile, c0, c1, theta0, [t_end])
    return theta[0]


@dataclass(frozen=True)
class WeightedEigenpair:
    """Radial eigenpair of the singular weighted problem.

    ``phi`` lives on ``profile.grid`` (so ``phi[0] = 0`` at the centre) and is
    scaled to unit sup norm; ``phi_t`` is its log-radius derivative ``r φ'``.
    """

    i: int
    beta: float
    phi: np.ndarray
    phi_t: np.ndarray
    profile: object = field(repr=False)
    _norm: float = field(repr=False, default=1.0)

    @property
    def decay(self):
        return sqrt(-self.beta)

    def evaluate(self, r):
        """(φ, r φ') at ascending radii in (0, 1]."""
        t = np.log(np.asarray(r, dtype=float)) + self.profile.t_end
        theta, lnamp = _shoot(self.profile, self.beta, 0.0, atan2(1.0, self.decay), t)
        amp = np.exp(lnamp) / self._norm
        return amp * np.sin(theta), amp * np.cos(theta)


def weighted_radial_eigen(profile, i):
    """β_{i,rad}(p) for i in {1, 2}, with its eigenfunction."""
    if i not in (1, 2):
        raise ValueError("only the two negative radial eigenvalues exist (i = 1, 2)")
    big_c = float(np.max(profile.potential())) + 1.0

    def angle(beta):
        return _terminal_angle(profile, beta, 0.0, atan2(1.0, sqrt(-beta)))

    lo, hi = -big_c, _BETA_TOP
    f_lo = angle(lo) - i * pi
    f_hi = angle(hi) - i * pi
    if not (f_lo < 0.0 < f_hi):
        raise NoNegativeEigenvalue(
            f"no sign change for i={i} on [{lo:.3g}, 0): "
            f"theta/pi = {(f_lo + i * pi) / pi:.4f}, {(f_hi + i * pi) / pi:.4f}")
    beta = brentq(lambda b: angle(b) - i * pi, lo, hi, xtol=_ROOT_XTOL, rtol=1e-15)

    theta, lnamp = _shoot(profile, beta, 0.0, atan2(1.0, sqrt(-beta)), profile.log_t)
    amp = np.exp(lnamp)
    raw = amp * np.sin(theta)
    norm = float(np.max(np.abs(raw)))
    phi = np.concatenate([[0.0], raw / norm])
    phi_t = np.concatenate([[0.0], amp * np.cos(theta) / norm])
    phi[-1] = 0.0
    return WeightedEigenpair(i, beta, phi, phi_t, profile, norm)


def weighted_inner(a, b):
    """∫_B a b / |x|^2 dx for two radial eigenfunctions on the same profile."""
    prof = a.profile
    t = prof.log_t
    v = prof.potential()
    fa = _quad.reconstruct(t, a.phi[1:], a.phi_t[1:], -(v + a.beta) * a.phi[1:])
    fb = _quad.reconstruct(t, b.phi[1:], b.phi_t[1:], -(v + b.beta) * b.phi[1:])
    _, wts = _quad.nodes(t)
    return 2.0 * pi * float((fa * fb * wts).sum())


@dataclass(frozen=True)
class AnnulusApprox:
    n: int
    i: int
    beta_n: float


def annulus_radial_eigen(profile, n, i, step=None):
    """i-th radial weighted eigenvalue on the annulus 1/n < |x| < 1.

    Central differences in log-radius give a symmetric tridiagonal matrix
    whose bias is negative and O(h^2).  The step is shared by all n
    (``ANNULUS_POINTS`` interior points at n = ``ANNULUS_REFERENCE``) and the
    nodes are laid out from the outer boundary, so the grids for different n
    are nested and the discrete values inherit the monotonicity in n.  The
    inner radius is rounded to the nearest node.
    """
    if n < 2:
        raise ValueError("annulus index n must be >= 2")
    if i not in (1, 2):
        raise ValueError("i must be 1 or 2")
    h = log(ANNULUS_REFERENCE) / (ANNULUS_POINTS + 1) if step is None else float(step)
    points = max(int(round(log(n) / h)) - 1, i)
    # the potential is sampled on the common grid so nested problems share node values
    full = max(points, ANNULUS_POINTS)
    t = -h * np.arange(full, 0, -1)
    v = profile.potential(t + profile.t_end)[full - points:]
    diag = 2.0 / h**2 - v
    off = np.full(points - 1, -1.0 / h**2)
    vals = eigh_tridiagonal(diag, off, eigvals_only=True, select="i",
                            select_range=(i - 1, i - 1))
    return AnnulusApprox(n, i, float(vals[0]))


@dataclass(frozen=True)
class ModeSpectrum:
    """Lowest eigenvalues μ of the mode-k radial reduction of L_p."""

    k: int
    mus: tuple
    count_negative: int


def _mode_theta0(profile, k, mu_scaled):
    if k == 0:
        rho0 = 1e-6
        return atan2(1.0, -(mu_scaled + profile.p) * rho0 * rho0 / 2.0)
    return atan2(1.0, float(k))


def _cutoff(profile, k, mu_s):
    """Log-radius past which every mode solution below ``mu`` has decayed.

    Where the upper bound ``sup V - k^2 + mu e^(2t)`` on Q stays negative the
    decaying solution loses ``exp(-∫ sqrt(-Q))``; once that exceeds
    ``DECAY_BUDGET`` the shot is closed with a Dirichlet condition, which
    moves the eigenvalues by an exponentially small amount and avoids the
    stiffness of very negative Q.
    """
    if mu_s >= 0.0:
        return profile.t_end
    t = profile.log_t
    vsup = np.maximum.accumulate(profile.potential()[::-1])[::-1]
    q = vsup - k * k + mu_s * np.exp(2.0 * t)
    root = np.sqrt(np.clip(-q, 0.0, None))
    # decay accumulated from each grid point to the end, counting only Q < 0
    seg = 0.5 * (root[1:] + root[:-1]) * np.diff(t)
    seg[(q[1:] >= 0.0) | (q[:-1] >= 0.0)] = 0.0
    tail = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])
    # the bound must stay negative from the cutoff to the end
    neg_suffix = np.flip(np.logical_and.accumulate(np.flip(q < 0.0)))
    ok = (tail >= DECAY_BUDGET) & neg_suffix
    idx = np.nonzero(ok)[0]
    return float(t[idx[0]]) if idx.size else profile.t_end


def _mode_angle(profile, k, mu_s):
    t_c = _cutoff(profile, k, mu_s)
    return _terminal_angle_to(profile, -float(k * k), mu_s, _mode_theta0(profile, k, mu_s), t_c)


def mode_count_below(profile, k, mu):
    """Number of mode-k eigenvalues strictly below ``mu`` (Sturm count)."""
    return int(floor(_mode_angle(profile, k, mu / profile.alpha_pow) / pi))


def mode_spectrum(profile, k, count):
    """First ``count`` eigenvalues of -h'' - h'/r + k^2 h/r^2 - p|u_p|^(p-1) h.

    Internally μ is scaled by ``alpha^(p-1)`` so the shots are scale free;
    the returned values are in physical units.
    """
    if k < 0 or count < 1:
        raise ValueError("need k >= 0 and count >= 1")
    scale = profile.alpha_pow

    def angle(mu):
        return _mode_angle(profile, k, mu / scale)

    # Rayleigh bound: mu_1 >= -p ||u_p||^(p-1); positive eigenvalues are O(1)
    # in physical units even when alpha^(p-1) is astronomically large
    lo = -(profile.p + 1.0) * scale
    hi = max(1.0, float(k * k))
    while angle(hi) < count * pi:
        hi *= 2.0
    # roots are sought in asinh(mu): the spectrum spans many decades when p is large
    mus = []
    a = np.arcsinh(lo)
    for j in range(1, count + 1):
        x = brentq(lambda x: angle(np.sinh(x)) - j * pi, a, np.arcsinh(hi),
                   xtol=1e-3 * MU_TOL, rtol=1e-14)
        mus.append(float(np.sinh(x)))
        a = x
    neg = int(floor(angle(0.0) / pi))
    return ModeSpectrum(k, tuple(mus), neg)
