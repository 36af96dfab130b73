from math import log

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lanemden import kernels
from lanemden.radial import integrate_ivp, ode_residual, scaling_check, series_start, solve_radial


def rk4_first_zero(p, alpha, h=1e-5):
    """First zero of u'' + u'/r + |u|^(p-1)u = 0 by classical RK4 in r."""

    def rhs(r, u, v):
        return v, -v / r - abs(u) ** (p - 1.0) * u

    r = h
    u = alpha - alpha ** p * h * h / 4.0
    v = -alpha ** p * h / 2.0
    while True:
        k1 = rhs(r, u, v)
        k2 = rhs(r + h / 2, u + h / 2 * k1[0], v + h / 2 * k1[1])
        k3 = rhs(r + h / 2, u + h / 2 * k2[0], v + h / 2 * k2[1])
        k4 = rhs(r + h, u + h * k3[0], v + h * k3[1])
        un = u + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        vn = v + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        if un <= 0.0:
            # cubic Hermite on the last step, solved by bisection
            a, b = 0.0, 1.0
            for _ in range(60):
                s = 0.5 * (a + b)
                h00, h10 = 2 * s**3 - 3 * s**2 + 1, s**3 - 2 * s**2 + s
                h01, h11 = -2 * s**3 + 3 * s**2, s**3 - s**2
                val = h00 * u + h10 * h * v + h01 * un + h11 * h * vn
                a, b = (s, b) if val > 0 else (a, s)
            return r + 0.5 * (a + b) * h
        r, u, v = r + h, un, vn


def test_first_zero_against_rk4():
    ref = rk4_first_zero(3.0, 1.0)
    got = integrate_ivp(3.0, 1.0, n_zeros=1).zeros[0]
    assert got == pytest.approx(ref, rel=1e-9)


@given(p=st.floats(1.3, 6.0), alpha=st.floats(0.1, 10.0))
@settings(max_examples=25, deadline=None)
def test_zero_scales_with_alpha(p, alpha):
    base = integrate_ivp(p, 1.0, n_zeros=1).zeros[0]
    got = integrate_ivp(p, alpha, n_zeros=1).zeros[0]
    assert got == pytest.approx(base * alpha ** (-(p - 1.0) / 2.0), rel=1e-8)


@pytest.mark.parametrize("p", [1.2, 2.0, 3.0, 5.0, 11.0])
def test_two_region_structure(cached_profile, p):
    prof = cached_profile(p)
    assert prof.grid[0] == 0.0 and prof.grid[-1] == 1.0
    assert prof.u[0] == prof.alpha == np.max(np.abs(prof.u))
    assert prof.u[-1] == 0.0
    assert len(prof.zeros) == 1 and 0.0 < prof.r1 < 1.0
    assert len(prof.critical_points) == 1
    assert prof.r1 < prof.s_p < 1.0
    assert prof.u_min < 0.0
    inner = prof.u[1:-1]
    assert np.sum(np.diff(np.sign(inner)) != 0) == 1
    assert ode_residual(prof) < 1e-8
    assert ode_residual(prof, sign=-1.0) < 1e-8


@pytest.mark.parametrize("p", [2.0, 3.0])
def test_peak_scaling_lengths(cached_profile, p):
    prof = cached_profile(p)
    assert prof.eps_plus ** -2 == pytest.approx(p * prof.alpha ** (p - 1.0), rel=1e-12)
    assert prof.eps_minus ** -2 == pytest.approx(p * abs(prof.u_min) ** (p - 1.0), rel=1e-10)
    assert prof.alpha_pow == pytest.approx(prof.alpha ** (p - 1.0), rel=1e-12)


@pytest.mark.parametrize("p", [1.5, 3.0])
def test_scaling_against_fresh_shot(cached_profile, p):
    assert scaling_check(cached_profile(p), 2.0) < 1e-8
    assert scaling_check(cached_profile(p), 1.0) == 0.0


def test_evaluate_matches_stored_profile(cached_profile):
    prof = cached_profile(3.0)
    idx = np.arange(1, len(prof.grid), 7)
    u, du = prof.evaluate(prof.grid[idx])
    np.testing.assert_allclose(u, prof.u[idx], atol=1e-9 * prof.alpha)
    np.testing.assert_allclose(du, prof.du[idx], rtol=1e-7, atol=1e-9 * prof.alpha)
    spline = prof.interpolant()
    assert abs(spline(prof.r1)) < 1e-6 * prof.alpha


@pytest.mark.parametrize("m", [1, 3])
def test_other_nodal_counts(m):
    prof = solve_radial(2.0, m)
    assert len(prof.zeros) == m - 1
    assert ode_residual(prof) < 1e-8
    if m == 1:
        assert np.all(prof.u[:-1] > 0.0)


def test_invalid_input():
    with pytest.raises(ValueError, match="p must exceed 1"):
        solve_radial(0.9, 2)
    with pytest.raises(ValueError):
        solve_radial(2.0, 0)
    with pytest.raises(ValueError):
        integrate_ivp(2.0, -1.0)


def test_backends_agree():
    py, cy = kernels.load("python"), kernels.load("cython")
    start = series_start(3.0, 1.0)
    a = py.trajectory(3.0, *start, start[0] + 10.0, 2)
    b = cy.trajectory(3.0, *start, start[0] + 10.0, 2)
    assert a[3] == b[3]
    np.testing.assert_allclose(a[1], b[1], rtol=0, atol=1e-13)
    t_out = np.linspace(start[0] + 1.0, log(3.0), 40)
    ta, _, sa = py.prufer(3.0, -20.0, 0.0, *start, 0.3, t_out)
    tb, _, sb = cy.prufer(3.0, -20.0, 0.0, *start, 0.3, t_out)
    assert sa == sb
    np.testing.assert_allclose(ta, tb, rtol=0, atol=1e-12)
