"""Radial nodal solutions of -Δu = |u|^(p-1) u on the unit disk.

Everything is integrated in the scale-free variable ``t = log(rho)`` for the
normalised shot ``w(0) = 1``; the physical profile follows from the scaling
``u(r) = R^(2/(p-1)) w(R r)`` with ``R`` the m-th zero of ``w``.
"""

from dataclasses import dataclass, field
from math import exp, log

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from . import _quad, kernels
from .errors import NotBracketed, ProfileFailure, StepFailure

R0 = 1e-6
RTOL = 1e-11
ATOL = 1e-13
T_MAX = 150.0
H_MAX = 0.1


def _check_status(status):
    if status == kernels.STATUS_UNDERFLOW:
        raise StepFailure("adaptive step size underflow")


def series_start(p, alpha, r0=R0):
    """Start state ``(t0, u, u_t)`` at ``r0`` scaled to the peak width.

    ``r0`` is measured in the scale-free radius ``alpha^((p-1)/2) r``.
    """
    rho0 = r0 * alpha ** (-(p - 1.0) / 2.0)
    return log(rho0), alpha * (1.0 - 0.25 * r0 * r0), -0.5 * alpha * r0 * r0


def _polish(p, ta, wa, wta, tb, which):
    """Root of w (which=0) or w_t (which=1) inside [ta, tb] by safeguarded Newton."""

    def state(t):
        w, wt, status = kernels.sample(p, ta, wa, wta, [t], RTOL, ATOL)
        _check_status(status)
        return w[0], wt[0]

    def f_df(t):
        w, wt = state(t)
        if which == 0:
            return w, wt
        return wt, -exp(2.0 * t) * abs(w) ** (p - 1.0) * w

    lo, hi = ta, tb
    f_lo = wa if which == 0 else wta
    t = 0.5 * (lo + hi)
    for _ in range(60):
        f, df = f_df(t)
        if f == 0.0:
            return t
        if (f > 0) == (f_lo > 0):
            lo, f_lo = t, f
        else:
            hi = t
        step = f / df if df != 0.0 else np.inf
        t_new = t - step
        if not lo < t_new < hi:
            t_new = 0.5 * (lo + hi)
        if abs(t_new - t) < 1e-15 * max(1.0, abs(t)) or hi - lo < 1e-15:
            return t_new
        t = t_new
    return t


@dataclass(frozen=True)
class Trajectory:
    """A shot of u'' + u'/r + |u|^(p-1)u = 0, u(0) = alpha, u'(0) = 0."""

    p: float
    alpha: float
    t: np.ndarray
    u: np.ndarray
    ut: np.ndarray
    zeros: tuple
    critical_points: tuple
    start: tuple = field(repr=False)

    @property
    def r(self):
        return np.exp(self.t)

    @property
    def du(self):
        return self.ut / self.r

    def sample(self, r):
        """(u, u') at ascending radii ``r`` (exact re-integration)."""
        r = np.asarray(r, dtype=float)
        t0, u0, ut0 = self.start
        u, ut, status = kernels.sample(self.p, t0, u0, ut0, np.log(r), RTOL, ATOL)
        _check_status(status)
        return u, ut / r


def integrate_ivp(p, alpha, n_zeros=1, t_max=None):
    """Shoot from the series start until ``n_zeros`` sign changes are found.

    Zeros and interior critical points are polished to full precision.  The
    horizon ``t_max`` is in log-radius; by default it sits far beyond the
    ``n_zeros``-th zero for every p the package targets.
    """
    if not p > 1.0:
        raise ValueError("p must exceed 1")
    if not alpha > 0.0:
        raise ValueError("alpha must be positive")
    t0, u0, ut0 = series_start(p, alpha)
    if t_max is None:
        t_max = t0 + T_MAX
    t, u, ut, status = kernels.trajectory(p, t0, u0, ut0, t_max, n_zeros, RTOL, ATOL, H_MAX)
    _check_status(status)
    zeros, crit = [], []
    for i in range(len(t) - 1):
        if (u[i] > 0) != (u[i + 1] > 0) or u[i + 1] == 0.0:
            zeros.append(exp(_polish(p, t[i], u[i], ut[i], t[i + 1], 0)))
        if i > 0 and (ut[i] > 0) != (ut[i + 1] > 0):
            crit.append(exp(_polish(p, t[i], u[i], ut[i], t[i + 1], 1)))
    return Trajectory(p, alpha, t, u, ut, tuple(zeros), tuple(crit), (t0, u0, ut0))


@dataclass(frozen=True)
class RadialProfile:
    """The radial solution with ``m`` nodal regions and ``u(0) > 0``.

    ``grid`` starts at 0 and ends at 1.  ``scale`` is the radius ``R`` at
    which the normalised shot has its m-th zero; ``log_t``, ``w`` and
    ``wt`` hold the normalised shot on ``grid[1:]`` in log-radius.
    """

    p: float
    m: int
    grid: np.ndarray
    u: np.ndarray
    du: np.ndarray
    alpha: float
    zeros: tuple
    s_p: float
    u_min: float
    eps_plus: float
    eps_minus: float
    scale: float
    log_t: np.ndarray = field(repr=False)
    w: np.ndarray = field(repr=False)
    wt: np.ndarray = field(repr=False)
    critical_points: tuple = ()

    @property
    def r1(self):
        return self.zeros[0] if self.zeros else None

    @property
    def t_end(self):
        return log(self.scale)

    @property
    def log_alpha(self):
        return 2.0 * log(self.scale) / (self.p - 1.0)

    @property
    def alpha_pow(self):
        """alpha^(p-1), computed without forming alpha."""
        return self.scale * self.scale

    def potential(self, t=None):
        """p rho^2 |w|^(p-1) in log-radius; equals p r^2 |u_p(r)|^(p-1)."""
        if t is None:
            return self.p * np.exp(2.0 * self.log_t) * np.abs(self.w) ** (self.p - 1.0)
        w, _ = self.sample_normalized(t)
        return self.p * np.exp(2.0 * np.asarray(t)) * np.abs(w) ** (self.p - 1.0)

    def sample_normalized(self, t):
        """Normalised shot (w, w_t) at ascending log-radii ``t`` by re-integration."""
        t0, w0, wt0 = series_start(self.p, 1.0)
        w, wt, status = kernels.sample(self.p, t0, w0, wt0, np.asarray(t, float), RTOL, ATOL)
        _check_status(status)
        return w, wt

    def evaluate(self, r):
        """(u, u') at ascending radii ``r`` in [0, 1], by re-integration."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        u = np.empty_like(r)
        du = np.empty_like(r)
        pos = r > 0
        u[~pos] = self.alpha
        du[~pos] = 0.0
        if pos.any():
            w, wt = self.sample_normalized(np.log(r[pos]) + self.t_end)
            u[pos] = self.alpha * w
            du[pos] = self.alpha * wt / r[pos]
        return u, du

    def interpolant(self):
        """Cubic Hermite interpolant of u built from the stored derivatives."""
        return CubicHermiteSpline(self.grid, self.u, self.du)


def solve_radial(p, m=2):
    """Radial solution with ``m`` nodal regions by shooting and rescaling."""
    if not p > 1.0:
        raise ValueError("p must exceed 1")
    if not 1 <= m <= 5:
        raise ValueError("m must lie in [1, 5]")
    traj = integrate_ivp(p, 1.0, n_zeros=m)
    if len(traj.zeros) < m:
        raise NotBracketed(f"only {len(traj.zeros)} of {m} zeros before the horizon")
    scale = traj.zeros[m - 1]
    log_alpha = 2.0 * log(scale) / (p - 1.0)
    if log_alpha > 700.0:
        raise ProfileFailure(f"u(0) = exp({log_alpha:.1f}) overflows double precision")
    alpha = exp(log_alpha)
    t_end = log(scale)

    landmarks = [log(z) for z in traj.zeros[: m - 1]] + [log(c) for c in traj.critical_points
                                                         if c < scale]
    steps = traj.t[traj.t < t_end - 1e-12]
    t_grid = np.unique(np.concatenate([steps, landmarks, [t_end]]))
    t0, w0, wt0 = traj.start
    w, wt, status = kernels.sample(p, t0, w0, wt0, t_grid, RTOL, ATOL)
    _check_status(status)
    w[-1] = 0.0

    r = np.exp(t_grid - t_end)
    r[-1] = 1.0
    grid = np.concatenate([[0.0], r])
    u = alpha * np.concatenate([[1.0], w])
    du = np.concatenate([[0.0], alpha * wt / r])

    zeros = tuple(z / scale for z in traj.zeros[: m - 1])
    crit = tuple(c / scale for c in traj.critical_points if c < scale)
    s_p = u_min = eps_minus = None
    if m >= 2:
        s_p = crit[0]
        w_min, _ = kernels.sample(p, t0, w0, wt0, [log(s_p) + t_end], RTOL, ATOL)[:2]
        u_min = alpha * w_min[0]
        eps_minus = (p * scale ** 2 * abs(w_min[0]) ** (p - 1.0)) ** -0.5
    eps_plus = (p * scale ** 2) ** -0.5
    return RadialProfile(
        p=p, m=m, grid=grid, u=u, du=du, alpha=alpha, zeros=zeros, s_p=s_p,
        u_min=u_min, eps_plus=eps_plus, eps_minus=eps_minus, scale=scale,
        log_t=t_grid, w=w, wt=wt, critical_points=crit,
    )


def ode_residual(profile, sign=1.0):
    """Relative residual of the radial equation along the stored profile.

    Uses the integrated form ``w_t(b) - w_t(a) + ∫_a^b e^{2t} |w|^(p-1) w dt``
    on every grid interval, normalised by ``max |w_t|``.  ``sign=-1`` checks
    the negated profile.
    """
    p = profile.p
    t = profile.log_t
    w = sign * profile.w
    wt = sign * profile.wt
    # nodal w_tt from the equation; values/slopes inconsistent with it still show up
    wtt = -np.exp(2.0 * t) * np.abs(w) ** (p - 1.0) * w
    tq, wts = _quad.nodes(t)
    wq = _quad.reconstruct(t, w, wt, wtt)
    integral = (np.exp(2.0 * tq) * np.abs(wq) ** (p - 1.0) * wq * wts).sum(axis=1)
    res = np.diff(wt) + integral
    return float(np.max(np.abs(res)) / np.max(np.abs(wt)))


def scaling_check(profile, T=2.0):
    """Discrepancy between the rescaled profile and a fresh shot.

    ``v(r) = T^(-2/(p-1)) u(r/T)`` must coincide on (0, T) with the solution
    of the initial value problem started at ``v(0)``; returns
    ``max |v - shot| / v(0)`` over the rescaled grid.
    """
    if T == 1.0:
        return 0.0
    p = profile.p
    factor = T ** (-2.0 / (p - 1.0))
    alpha_t = factor * profile.alpha
    traj = integrate_ivp(p, alpha_t, n_zeros=10**6, t_max=log(T) + 0.1)
    r = profile.grid[1:] * T
    v = factor * profile.u[1:]
    shot, _ = traj.sample(r)
    return float(np.max(np.abs(v - shot)) / alpha_t)
