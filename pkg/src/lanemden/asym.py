"""The two asymptotic regimes of the nodal radial solution.

Near p = 1 the normalised profile tends to J_0(nu_02 r) and
``alpha^(p-1) = lambda_2rad (1 - c~ (p-1)) + o(p-1)``.  For large p the
ratio ``s_p / eps_p^-`` tends to a constant ell and
``beta_{1,rad}(p) -> -(ell^2 + 2) / 2``.
"""

from dataclasses import dataclass, field
from math import log, sqrt

import numpy as np
from scipy.integrate import quad

from .eigen import weighted_radial_eigen
from .errors import LaneEmdenError, ProfileFailure
from .morse import _integer_j
from .radial import solve_radial
from .specfun import bessel_j, bessel_zero, lambda_2rad

ELL = 7.1979
BETA1_LIMIT = -(ELL * ELL + 2.0) / 2.0
NEAR_ONE_P = (1.04, 1.02, 1.01, 1.005)
LARGE_P = (20.0, 40.0, 60.0, 80.0, 100.0, 120.0)
SUP_SAMPLES = 2001
MAX_BACKOFF = 4


def _phi2(r):
    return bessel_j(0, bessel_zero(0, 2) * r)


def _ctilde_integrands():
    nu = bessel_zero(0, 2)

    def num(r):
        j = bessel_j(0, nu * r)
        return r * j * j * log(abs(j)) if j != 0.0 else 0.0

    def den(r):
        j = bessel_j(0, nu * r)
        return r * j * j

    # J_0(nu_02 r) vanishes at r = nu_01 / nu_02; the log singularity sits there
    return num, den, bessel_zero(0, 1) / nu


def compute_ctilde(quadrature_points=512):
    """c~ = ∫_B φ² log|φ| / ∫_B φ² for φ = J_0(nu_02 |x|), by adaptive quadrature.

    ``quadrature_points`` bounds the subinterval count of the adaptive rule
    on each side of the zero circle.
    """
    if quadrature_points < 256:
        raise ValueError("quadrature_points must be at least 256")
    num, den, z = _ctilde_integrands()
    opts = dict(limit=quadrature_points, epsabs=1e-13, epsrel=1e-12)
    top = quad(num, 0.0, z, **opts)[0] + quad(num, z, 1.0, **opts)[0]
    bottom = quad(den, 0.0, z, **opts)[0] + quad(den, z, 1.0, **opts)[0]
    return top / bottom


def ctilde_simpson(panels=4096):
    """Composite Simpson estimate of c~ (fixed order, independent of compute_ctilde)."""
    num, den, z = _ctilde_integrands()
    n = panels + panels % 2

    def simpson(f, a, b):
        x = np.linspace(a, b, n + 1)
        y = np.array([f(v) for v in x])
        return (b - a) / (3.0 * n) * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum())

    top = simpson(num, 0.0, z) + simpson(num, z, 1.0)
    bottom = simpson(den, 0.0, z) + simpson(den, z, 1.0)
    return top / bottom


@dataclass(frozen=True)
class AsymptoticReport:
    regime: str
    p_values: tuple
    sup_errors: tuple = ()
    alpha_pow: tuple = ()
    fitted_slope: float = None
    slope_target: float = None
    slope_rel_error: float = None
    secant_slopes: tuple = ()
    fit_residual: float = None
    c_tilde: float = None
    ell_estimates: tuple = ()
    ell_from_beta1: float = None
    beta1_values: tuple = ()
    beta2_values: tuple = ()
    j_values: tuple = ()
    beta1_limit: float = BETA1_LIMIT
    beta1_monotone: bool = None
    eps_identity_error: float = None
    skipped: tuple = field(default=())

    @property
    def horizon(self):
        return self.p_values[-1] if self.p_values else None


def sup_error_j0(profile, samples=SUP_SAMPLES):
    """sup_r |u(r)/alpha - J_0(nu_02 r)| on a uniform radius grid."""
    r = np.linspace(0.0, 1.0, samples)
    u, _ = profile.evaluate(r)
    phi = np.array([_phi2(x) for x in r])
    return float(np.max(np.abs(u / profile.alpha - phi)))


def validate_near_one(p_sequence=NEAR_ONE_P, ctilde=None):
    """Convergence to J_0(nu_02 r) and the linear coefficient of alpha^(p-1).

    The slope is fitted with the intercept pinned at lambda_2rad, using
    ``alpha^(p-1) - lambda_2rad = s (p-1) + q (p-1)^2``; the quadratic
    term absorbs the leading part of the o(p-1) remainder.  The fit
    residual is reported without the smallest p-1 point.
    """
    ps = tuple(float(p) for p in p_sequence)
    if any(not 1.0 < p <= 1.2 for p in ps):
        raise ValueError("near-one regime requires p in (1, 1.2]")
    if list(ps) != sorted(ps, reverse=True):
        raise ValueError("p_sequence must decrease toward 1")
    lam = lambda_2rad()
    c_t = compute_ctilde() if ctilde is None else ctilde
    sup, apow = [], []
    for p in ps:
        prof = solve_radial(p, 2)
        sup.append(sup_error_j0(prof))
        apow.append(prof.alpha_pow)
    x = np.array(ps) - 1.0
    y = np.array(apow) - lam
    design = np.column_stack([x, x * x]) if len(ps) >= 3 else x[:, None]
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    slope = float(coef[0])
    target = -lam * c_t
    keep = x > x.min()
    fit_res = float(np.max(np.abs((design @ coef - y)[keep]))) if keep.any() else 0.0
    return AsymptoticReport(
        regime="near-one", p_values=ps, sup_errors=tuple(sup), alpha_pow=tuple(apow),
        fitted_slope=slope, slope_target=target,
        slope_rel_error=abs(slope - target) / abs(target),
        secant_slopes=tuple(float(v) for v in y / x), fit_residual=fit_res, c_tilde=c_t,
    )


def validate_large_p(p_sequence=LARGE_P):
    """ell estimates, beta_1 trend and Morse data along increasing p.

    A p at which the profile or the eigen-solve fails is retried at the
    geometric midpoint towards the last good p, at most ``MAX_BACKOFF``
    times; points that still fail are listed in ``skipped`` and the
    sequence stops there.
    """
    ps = [float(p) for p in p_sequence]
    if ps != sorted(ps):
        raise ValueError("p_sequence must increase")
    done, ell, b1s, b2s, js, eps_err, skipped = [], [], [], [], [], [], []
    for p in ps:
        target = p
        result = None
        for _ in range(MAX_BACKOFF + 1):
            try:
                prof = solve_radial(target, 2)
                e1 = weighted_radial_eigen(prof, 1).beta
                e2 = weighted_radial_eigen(prof, 2).beta
                result = (target, prof, e1, e2)
                break
            except LaneEmdenError:
                skipped.append(target)
                if not done:
                    break
                target = sqrt(target * done[-1])
        if result is None:
            break
        p_ok, prof, e1, e2 = result
        done.append(p_ok)
        ell.append(float(prof.s_p / prof.eps_minus))
        b1s.append(e1)
        b2s.append(e2)
        js.append(_integer_j(e1))
        # (eps^-)^-2 = p |u(s_p)|^(p-1), checked in logs since both sides can overflow
        lhs = -2.0 * log(prof.eps_minus)
        rhs = log(p_ok) + (p_ok - 1.0) * log(abs(prof.u_min))
        eps_err.append(abs(lhs - rhs))
        if p_ok < p:
            break
    if not done:
        raise ProfileFailure(f"no stable p in {ps}")
    b1 = np.array(b1s)
    return AsymptoticReport(
        regime="large-p", p_values=tuple(done), ell_estimates=tuple(ell),
        ell_from_beta1=sqrt(-2.0 * b1s[-1] - 2.0), beta1_values=tuple(b1s),
        beta2_values=tuple(b2s), j_values=tuple(js),
        beta1_monotone=bool(np.all(np.diff(b1) < 0.0)),
        eps_identity_error=float(max(eps_err)), skipped=tuple(skipped),
    )


def j_plateaus(p_values):
    """j(p) along ``p_values`` and the empirical plateau boundaries.

    Returns ``(js, edges)`` where ``edges`` lists ``(p_left, p_right, j_left,
    j_right)`` for every change of j between consecutive samples.
    """
    js = [_integer_j(weighted_radial_eigen(solve_radial(p, 2), 1).beta) for p in p_values]
    edges = [(p_values[n], p_values[n + 1], js[n], js[n + 1])
             for n in range(len(js) - 1) if js[n] != js[n + 1]]
    return js, edges
