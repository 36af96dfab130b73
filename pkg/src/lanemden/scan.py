"""Degenerate exponents: sign changes of beta_{1,rad}(p) + j^2 in p.

The same machinery scans beta_{2,rad}(p) + 1, which is reported but never
expected to change sign.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .eigen import weighted_radial_eigen
from .errors import LostBracket
from .radial import solve_radial

P_XTOL = 1e-6
RESIDUAL_TOL = 1e-4
TANGENCY_TOL = 1e-3
DEFAULT_WINDOW = (1.05, 6.0)
DEFAULT_GRID = 64


def beta_rad(p, i=1):
    """beta_{i,rad}(p) for the two-nodal-region radial solution."""
    return weighted_radial_eigen(solve_radial(p, 2), i).beta


@dataclass(frozen=True)
class DegenerateExponent:
    """A bracketed root of ``beta_{i,rad}(p) + level``.

    ``direction`` is "+-" when the function goes from positive to negative
    with increasing p, "-+" for the reverse and "none" for a tangential
    touch (not a member of the degenerate set).
    """

    j: int
    p_star: float
    bracket: tuple
    direction: str
    residual: float
    index: int = 1
    history: tuple = field(default=(), repr=False)

    @property
    def level(self):
        return -float(self.j * self.j)


@dataclass(frozen=True)
class ScanResult:
    j: int
    index: int
    grid: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    crossings: tuple
    tangencies: tuple

    @property
    def closest(self):
        """(p, value) of the grid point nearest the level."""
        n = int(np.argmin(np.abs(self.values)))
        return float(self.grid[n]), float(self.values[n])


def geometric_grid(p_lo, p_hi, grid_count):
    """``grid_count`` exponents geometric in p - 1, endpoints included."""
    if not 1.0 < p_lo < p_hi:
        raise ValueError("need 1 < p_lo < p_hi")
    if grid_count < 16:
        raise ValueError("grid_count must be at least 16")
    return 1.0 + np.geomspace(p_lo - 1.0, p_hi - 1.0, grid_count)


def _evaluate(fn, ps, threads):
    if threads is None or threads <= 1:
        return np.array([fn(p) for p in ps])
    with ThreadPoolExecutor(max_workers=threads) as pool:
        # map preserves input order, so the reduction is deterministic
        return np.array(list(pool.map(fn, ps)))


def _direction(g_lo, g_hi):
    return "+-" if g_lo > 0.0 else "-+"


def refine_crossing(j, bracket, index=1, xtol=P_XTOL, fn=None):
    """Bisect a sign change of ``beta_{index,rad}(p) + j^2`` down to width ``xtol``.

    Endpoint values are recomputed first; a bracket whose endpoints share a
    sign raises LostBracket.
    """
    level = float(j * j)
    fn = fn or (lambda p: beta_rad(p, index))

    def g(p):
        return fn(p) + level

    a, b = float(bracket[0]), float(bracket[1])
    if not a < b:
        raise ValueError("bracket must be increasing")
    g_a, g_b = g(a), g(b)
    if g_a == 0.0:
        return DegenerateExponent(j, a, (a, b), _direction(g_a, g_b), 0.0, index)
    if g_b == 0.0:
        return DegenerateExponent(j, b, (a, b), _direction(g_a, g_b), 0.0, index)
    if (g_a > 0.0) == (g_b > 0.0):
        raise LostBracket(f"j={j}: no sign change on [{a}, {b}] ({g_a:.3e}, {g_b:.3e})")
    direction = _direction(g_a, g_b)
    history = []
    while b - a > xtol:
        m = 0.5 * (a + b)
        g_m = g(m)
        history.append((m, g_m))
        if g_m == 0.0:
            a = b = m
            break
        if (g_m > 0.0) == (g_a > 0.0):
            a, g_a = m, g_m
        else:
            b, g_b = m, g_m
    # the secant point inside the final bracket beats its midpoint
    p_star = a if a == b else a - g_a * (b - a) / (g_b - g_a)
    residual = abs(g(p_star))
    return DegenerateExponent(j, p_star, (a, b), direction, residual, index, tuple(history))


def scan_level(j, p_lo=DEFAULT_WINDOW[0], p_hi=DEFAULT_WINDOW[1], grid_count=DEFAULT_GRID,
               index=1, threads=None, fn=None, xtol=P_XTOL):
    """Scan ``beta_{index,rad}(p) + j^2`` on a geometric grid and refine every sign change.

    Grid points where the function comes within ``TANGENCY_TOL`` of zero at
    a local minimum of ``|g|`` without changing sign are reported as
    tangencies.
    """
    fn = fn or (lambda p: beta_rad(p, index))
    ps = geometric_grid(p_lo, p_hi, grid_count)
    vals = _evaluate(fn, ps, threads) + float(j * j)
    crossings = []
    for n in range(len(ps) - 1):
        if vals[n] == 0.0 or (vals[n] > 0.0) != (vals[n + 1] > 0.0):
            crossings.append(refine_crossing(j, (ps[n], ps[n + 1]), index, xtol, fn))
    tangencies = []
    mag = np.abs(vals)
    for n in range(1, len(ps) - 1):
        same = (vals[n - 1] > 0) == (vals[n] > 0) == (vals[n + 1] > 0)
        if same and mag[n] < TANGENCY_TOL and mag[n] <= mag[n - 1] and mag[n] <= mag[n + 1]:
            tangencies.append(DegenerateExponent(j, float(ps[n]), (ps[n - 1], ps[n + 1]),
                                                 "none", float(mag[n]), index))
    return ScanResult(j, index, ps, vals, tuple(crossings), tuple(tangencies))


def scan_degenerate(j, p_lo=DEFAULT_WINDOW[0], p_hi=DEFAULT_WINDOW[1],
                    grid_count=DEFAULT_GRID, threads=None):
    """Transversal crossings of beta_{1,rad}(p) = -j^2 on the window, in increasing p."""
    return scan_level(j, p_lo, p_hi, grid_count, 1, threads).crossings


def scan_beta2(p_lo=DEFAULT_WINDOW[0], p_hi=DEFAULT_WINDOW[1], grid_count=DEFAULT_GRID,
               threads=None):
    """Diagnostic scan of beta_{2,rad}(p) + 1; crossings and near-touches are reported only."""
    return scan_level(1, p_lo, p_hi, grid_count, 2, threads)


def endpoint_parity(j, p_lo, p_hi, index=1, fn=None):
    """Expected crossing-count parity from the endpoint signs: 1 odd, 0 even."""
    fn = fn or (lambda p: beta_rad(p, index))
    g_lo, g_hi = fn(p_lo) + j * j, fn(p_hi) + j * j
    return int((g_lo > 0.0) != (g_hi > 0.0))
