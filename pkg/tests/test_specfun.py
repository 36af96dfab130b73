import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from lanemden.specfun import bessel_j, bessel_zero, disk_eigenstructure, lambda_2rad


@pytest.mark.parametrize("n", [0, 1, 2, 5, 9])
@pytest.mark.parametrize("x", [1e-3, 0.7, 5.0, 7.9, 8.1, 12.0, 23.4, 40.0])
def test_bessel_matches_mpmath(n, x):
    ref = float(mpmath.besselj(n, x))
    assert abs(bessel_j(n, x) - ref) <= 1e-13 * max(1.0, abs(ref))


@given(n=st.integers(0, 12), x=st.floats(0.0, 60.0))
@settings(max_examples=200, deadline=None)
def test_bessel_matches_scipy(n, x):
    assert abs(bessel_j(n, x) - special.jv(n, x)) < 1e-12


@given(n=st.integers(1, 10), x=st.floats(0.5, 50.0))
@settings(max_examples=100, deadline=None)
def test_three_term_recurrence(n, x):
    lhs = bessel_j(n - 1, x) + bessel_j(n + 1, x)
    assert abs(lhs - 2.0 * n / x * bessel_j(n, x)) < 1e-11


@pytest.mark.parametrize("n", range(6))
def test_zeros_match_scipy(n):
    ref = special.jn_zeros(n, 5)
    got = [bessel_zero(n, k) for k in range(1, 6)]
    np.testing.assert_allclose(got, ref, rtol=0, atol=1e-12)


def test_zero_index_starts_at_one():
    with pytest.raises(ValueError):
        bessel_zero(0, 0)


def test_lambda_2rad():
    assert lambda_2rad() == pytest.approx(special.jn_zeros(0, 2)[1] ** 2, abs=1e-11)


def test_disk_spectrum_against_brute_force():
    es = disk_eigenstructure(40)
    ref = sorted(z ** 2 for n in range(0, 20) for z in special.jn_zeros(n, 8)
                 for _ in range(1 if n == 0 else 2))[:40]
    np.testing.assert_allclose(es.eigenvalues(), ref, rtol=1e-12)


def test_disk_spectrum_counts():
    es = disk_eigenstructure(10)
    assert len(es.eigenvalues()) == 10
    assert es.find(0, 2).multiplicity == 1
    assert es.find(3, 1).multiplicity == 2
    with pytest.raises(KeyError):
        es.find(30, 1)
    with pytest.raises(ValueError):
        disk_eigenstructure(0)
