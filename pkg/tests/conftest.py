from functools import lru_cache

import pytest

from lanemden.eigen import weighted_radial_eigen
from lanemden.radial import solve_radial


@lru_cache(maxsize=None)
def profile(p, m=2):
    return solve_radial(p, m)


@lru_cache(maxsize=None)
def beta(p, i):
    return weighted_radial_eigen(profile(p), i).beta


@pytest.fixture(scope="session")
def cached_profile():
    return profile


@pytest.fixture(scope="session")
def cached_beta():
    return beta


_ACCEPTANCE = {}


class AcceptanceLog:
    """Collects one verdict per acceptance criterion (sub-cases are AND-ed)."""

    def record(self, number, title, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number:2d} [{title}] {detail}"
        print(line)
        entry = _ACCEPTANCE.setdefault(number, [title, True, []])
        entry[1] = entry[1] and bool(ok)
        entry[2].append(detail)
        return ok


@pytest.fixture(scope="session")
def acceptance():
    return AcceptanceLog()


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, ok, details = _ACCEPTANCE[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {number:2d}  {title}: "
                                    + "; ".join(details))
