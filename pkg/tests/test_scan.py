import numpy as np
import pytest

from lanemden.errors import LostBracket
from lanemden.scan import (beta_rad, endpoint_parity, geometric_grid, refine_crossing,
                           scan_beta2, scan_degenerate, scan_level)


def test_refine_synthetic_root():
    root = refine_crossing(3, (1.5, 3.0), fn=lambda p: -9.0 + 0.7 * (2.0 - p))
    assert root.p_star == pytest.approx(2.0, abs=1e-12)
    assert root.direction == "+-"
    assert root.level == -9.0
    assert root.bracket[1] - root.bracket[0] <= 1e-6
    assert root.residual < 1e-12
    rising = refine_crossing(2, (0.0, 1.0), fn=lambda p: -4.0 + (p - 0.3) * (1.0 + p))
    assert rising.direction == "-+"
    assert rising.p_star == pytest.approx(0.3, abs=1e-6)


def test_lost_bracket():
    with pytest.raises(LostBracket):
        refine_crossing(3, (1.5, 3.0), fn=lambda p: -8.0)
    with pytest.raises(ValueError):
        refine_crossing(3, (3.0, 1.5), fn=lambda p: -8.0)


def test_scan_finds_both_crossings():
    def fn(p):
        return -9.0 - (p - 2.0) * (4.0 - p) + (0.0 if p < 4.5 else -(p - 4.5) * (5.5 - p) * 4.0)

    res = scan_level(3, 1.2, 6.0, 256, fn=fn)
    assert [c.direction for c in res.crossings] == ["+-", "-+"]
    np.testing.assert_allclose([c.p_star for c in res.crossings], [2.0, 4.0], atol=1e-6)


def test_tangency_is_reported_not_crossed():
    fn = lambda p: -9.0 + (p - 2.5) ** 2 + 2e-4
    res = scan_level(3, 1.5, 3.5, 101, fn=fn)
    assert res.crossings == ()
    assert len(res.tangencies) == 1
    assert res.tangencies[0].direction == "none"
    assert res.closest[0] == pytest.approx(2.5, abs=0.02)


def test_grid_validation():
    g = geometric_grid(1.05, 6.0, 16)
    assert g[0] == pytest.approx(1.05) and g[-1] == pytest.approx(6.0)
    assert np.all(np.diff(np.log(g - 1.0)) > 0)
    with pytest.raises(ValueError):
        geometric_grid(1.05, 6.0, 8)
    with pytest.raises(ValueError):
        geometric_grid(0.9, 6.0, 32)


def test_first_degenerate_exponent():
    crossings = scan_degenerate(3, grid_count=32)
    assert len(crossings) % 2 == 1
    first = crossings[0]
    assert first.p_star == pytest.approx(1.6684165, abs=1e-6)
    assert first.residual < 1e-4
    assert abs(beta_rad(first.p_star) + 9.0) < 1e-4
    assert endpoint_parity(3, 1.05, 6.0) == 1


def test_threads_do_not_change_results():
    a = scan_level(4, 3.0, 4.0, 16, threads=1)
    b = scan_level(4, 3.0, 4.0, 16, threads=3)
    np.testing.assert_array_equal(a.values, b.values)
    assert [c.p_star for c in a.crossings] == [c.p_star for c in b.crossings]


def test_beta2_never_reaches_minus_one():
    res = scan_beta2(1.05, 6.0, 16)
    assert res.crossings == ()
    assert np.all(res.values > 0.0)
