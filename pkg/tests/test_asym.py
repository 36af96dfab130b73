import numpy as np
import pytest

from lanemden.asym import (BETA1_LIMIT, ELL, compute_ctilde, ctilde_simpson, j_plateaus,
                           sup_error_j0, validate_large_p, validate_near_one)
from lanemden.specfun import lambda_2rad


def test_ctilde_two_quadratures_agree():
    adaptive = compute_ctilde()
    simpson = ctilde_simpson(8192)
    assert adaptive == pytest.approx(simpson, abs=1e-8)
    assert -0.8 < adaptive < -0.77
    with pytest.raises(ValueError):
        compute_ctilde(16)


def test_ctilde_simpson_converges():
    errs = [abs(ctilde_simpson(n) - compute_ctilde()) for n in (512, 2048)]
    assert errs[1] < errs[0]


def test_near_one_regime():
    rep = validate_near_one()
    assert rep.regime == "near-one"
    sup = np.array(rep.sup_errors)
    assert np.all(np.diff(sup) < 0)
    # sup error is linear in p - 1
    ratios = sup / (np.array(rep.p_values) - 1.0)
    assert np.ptp(ratios) < 0.05 * ratios.mean()
    assert rep.slope_rel_error < 1e-3
    assert rep.slope_target == pytest.approx(-lambda_2rad() * rep.c_tilde)
    # secant slopes approach the fitted slope monotonically
    secant = np.array(rep.secant_slopes)
    assert np.all(np.diff(np.abs(secant - rep.fitted_slope)) < 0)


def test_near_one_arguments():
    with pytest.raises(ValueError):
        validate_near_one((1.01, 1.02))
    with pytest.raises(ValueError):
        validate_near_one((1.5, 1.1))


def test_sup_error_small_near_one(cached_profile):
    assert sup_error_j0(cached_profile(1.01)) < 0.005


def test_large_p_trend():
    rep = validate_large_p((20.0, 40.0, 80.0))
    assert rep.p_values == (20.0, 40.0, 80.0)
    assert rep.beta1_monotone
    assert rep.j_values[-1] == 6
    assert rep.eps_identity_error < 1e-8
    assert abs(rep.ell_estimates[-1] - ELL) < 0.1 * ELL
    assert abs(rep.beta1_values[-1] - BETA1_LIMIT) < 0.15 * abs(BETA1_LIMIT)
    assert all(isinstance(v, float) for v in rep.ell_estimates)
    with pytest.raises(ValueError):
        validate_large_p((40.0, 20.0))


def test_j_plateaus():
    js, edges = j_plateaus([1.2, 1.6, 1.8, 3.3, 3.6])
    assert js == [3, 3, 4, 4, 5]
    assert [(e[2], e[3]) for e in edges] == [(3, 4), (4, 5)]
