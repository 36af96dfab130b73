import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from lanemden.eigen import weighted_inner, weighted_radial_eigen
from lanemden.errors import InvalidOrdering
from lanemden.morse import (Generator, ModeFunction, _integer_j, assemble_morse,
                            classify_degeneracy, morse_report, quadratic_form)


def brute_force(beta1, beta2, K=8, l_max=200):
    """Enumerate beta_i + l^2 < 0 directly; cos and sin count separately for l >= 1."""
    full = 0
    mk = {k: 0 for k in range(1, K + 1)}
    for beta in (beta1, beta2):
        for l in range(l_max):
            if beta + l * l < 0.0:
                full += 1 if l == 0 else 2
                for k in mk:
                    # invariant functions keep only cos(l θ) with k | l
                    mk[k] += 1 if l % k == 0 else 0
    return full, mk


betas = st.tuples(st.floats(-120.0, -1.0001), st.floats(-1.0, -1e-6))


@given(betas)
@settings(max_examples=300, deadline=None)
def test_assembly_matches_enumeration(pair):
    beta1, beta2 = pair
    assume(beta1 < beta2)
    rep = assemble_morse(beta1, beta2)
    full, mk = brute_force(beta1, beta2)
    assert rep.m_full == full
    assert rep.m_k == mk


@given(betas)
@settings(max_examples=300, deadline=None)
def test_index_is_twice_j(pair):
    beta1, beta2 = pair
    assume(beta1 < beta2)
    rep = assemble_morse(beta1, beta2)
    assert -(rep.j ** 2) <= beta1 < -((rep.j - 1) ** 2)
    assert rep.m_full == 2 * rep.j
    assert rep.m_full % 2 == 0 and rep.m_full >= 4
    assert all(v >= 2 for v in rep.m_k.values())
    assert rep.m_k[1] == rep.j + 1


def test_integer_j_at_perfect_squares():
    assert _integer_j(-9.0) == 3
    assert _integer_j(-9.0 + 1e-15) == 3
    assert _integer_j(-4.0) == 2
    assert _integer_j(-3.9) == 2
    assert _integer_j(np.nextafter(-16.0, 0.0)) == 4
    assert _integer_j(np.nextafter(-16.0, -20.0)) == 5
    with pytest.raises(InvalidOrdering):
        _integer_j(-0.5)


@pytest.mark.parametrize("beta1, beta2, j, m_full, mk", [
    (-30.0, -0.5, 6, 12, (7, 4, 3, 3, 3, 2, 2, 2)),
    (-5.0, -0.5, 3, 6, (4, 3, 2, 2, 2, 2, 2, 2)),
    (-16.0, -0.2, 4, 8, (5, 3, 3, 2, 2, 2, 2, 2)),
])
def test_worked_examples(beta1, beta2, j, m_full, mk):
    rep = assemble_morse(beta1, beta2)
    assert (rep.j, rep.m_full, rep.m_k_tuple(8)) == (j, m_full, mk)
    assert rep.m_rad == 2


def test_ordering_is_validated():
    with pytest.raises(InvalidOrdering):
        assemble_morse(-0.5, -5.0)
    with pytest.raises(InvalidOrdering):
        assemble_morse(-5.0, 0.0)


def test_degeneracy_classification():
    kern = classify_degeneracy(-9.0 + 1e-7, -0.5)
    assert kern.dimension == 2 and kern.degenerate
    assert Generator(1, 3, "cos") in kern.generators
    assert kern.restricted(3).dimension == 1
    assert kern.restricted(2).dimension == 0
    assert str(kern.restricted(3)) == "span{phi1(r) cos(3θ)}"
    assert classify_degeneracy(-9.5, -0.5).dimension == 0
    assert str(classify_degeneracy(-9.5, -0.5)) == "{0}"
    both = classify_degeneracy(-16.0, -1.0)
    assert both.dimension == 4
    assert both.restricted(1).dimension == 2
    with pytest.raises(ValueError):
        classify_degeneracy(-9.0, -0.5, tol=0.0)


@pytest.mark.parametrize("p", [2.0, 4.0])
def test_report_from_profile(cached_profile, p):
    rep = morse_report(cached_profile(p))
    assert rep.p == p and rep.m_full == 2 * rep.j
    values = [e.value for e in rep.decomposition]
    assert values == sorted(values)
    assert sum(e.multiplicity for e in rep.decomposition if e.value < 0) == rep.m_full


@pytest.mark.parametrize("p", [2.0, 3.0])
def test_quadratic_form_of_eigenfunction(cached_profile, p):
    prof = cached_profile(p)
    e1 = weighted_radial_eigen(prof, 1)
    dh = np.concatenate([[0.0], e1.phi_t[1:] / prof.grid[1:]])
    q0 = quadratic_form(prof, ModeFunction(0, e1.phi, dh))
    assert q0 == pytest.approx(e1.beta * weighted_inner(e1, e1), rel=1e-6)
    # adding k^2 to beta_1 matches the mode-k form up to the angular factor π vs 2π
    k = 2
    qk = quadratic_form(prof, ModeFunction(k, e1.phi, dh, "sin"))
    assert qk == pytest.approx(0.5 * (e1.beta + k * k) * weighted_inner(e1, e1), rel=1e-6)
    with pytest.raises(ValueError):
        quadratic_form(prof, [ModeFunction(1, e1.phi, dh), ModeFunction(1, e1.phi, dh)])
