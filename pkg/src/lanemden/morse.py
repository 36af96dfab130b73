"""Morse indices of u_p assembled from the two negative radial weighted eigenvalues.

A negative weighted eigenvalue decomposes as ``beta = beta_{i,rad} + k^2``
with eigenfunctions ``phi_i(r) cos(k theta)`` and ``phi_i(r) sin(k theta)``.
Counting the negative combinations gives the full Morse index; keeping
only the cos modes whose frequency is a multiple of ``k`` gives the index
in the space of functions invariant under the dihedral group of order 2k.
"""

from dataclasses import dataclass, field
from math import ceil, pi, sqrt

import numpy as np
from scipy.integrate import simpson

from .errors import InvalidOrdering

DEGENERACY_TOL = 1e-5
DEFAULT_K = 8


@dataclass(frozen=True)
class Generator:
    """One kernel direction ``phi_i(r) cos(mode theta)`` (or sin)."""

    i: int
    mode: int
    kind: str

    def __str__(self):
        return f"phi{self.i}(r) {self.kind}({self.mode}θ)"


@dataclass(frozen=True)
class KernelDescription:
    """Kernel of L_p as a list of separated generators."""

    generators: tuple = ()

    @property
    def dimension(self):
        return len(self.generators)

    @property
    def degenerate(self):
        return bool(self.generators)

    def restricted(self, k):
        """Part of the kernel invariant under the dihedral group of order 2k.

        Such functions contain only cos(l theta) with k dividing l, so sin
        generators and cos modes not divisible by ``k`` drop out.
        """
        keep = tuple(g for g in self.generators if g.kind == "cos" and g.mode % k == 0)
        return KernelDescription(keep)

    def __str__(self):
        if not self.generators:
            return "{0}"
        return "span{" + ", ".join(str(g) for g in self.generators) + "}"


@dataclass(frozen=True)
class DecompositionEntry:
    k: int
    i: int
    value: float
    multiplicity: int


@dataclass(frozen=True)
class MorseReport:
    """Full, radial and k-symmetric Morse indices at one exponent."""

    p: float
    beta1: float
    beta2: float
    j: int
    m_full: int
    m_rad: int
    m_k: dict
    decomposition: tuple = field(repr=False)
    degenerate: bool = False
    kernel: KernelDescription = KernelDescription()

    def m_k_tuple(self, K=None):
        K = max(self.m_k) if K is None else K
        return tuple(self.m_k[k] for k in range(1, K + 1))


def _integer_j(beta1):
    j = max(2, ceil(sqrt(-beta1)))
    # guard against rounding in sqrt at perfect squares
    while -(j * j) > beta1:
        j += 1
    while j > 2 and beta1 >= -((j - 1) ** 2):
        j -= 1
    if not -(j * j) <= beta1 < -((j - 1) ** 2):
        raise InvalidOrdering(f"beta1 = {beta1} admits no j >= 2 with -j^2 <= beta1 < -(j-1)^2")
    return j


def _negative_modes(beta, k_stop):
    return [k for k in range(1, k_stop + 1) if beta + k * k < 0.0]


def classify_degeneracy(beta1, beta2, tol=DEGENERACY_TOL):
    """Kernel of L_p from the degeneracy conditions on the radial eigenvalues.

    ``u_p`` is degenerate iff ``beta1 = -j^2`` for an integer j or
    ``beta2 = -1``; each condition contributes a cos/sin pair.
    """
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    gens = []
    if beta1 < 0.0:
        j = round(sqrt(-beta1))
        if j >= 1 and abs(beta1 + j * j) < tol:
            gens += [Generator(1, j, "cos"), Generator(1, j, "sin")]
    if abs(beta2 + 1.0) < tol:
        gens += [Generator(2, 1, "cos"), Generator(2, 1, "sin")]
    return KernelDescription(tuple(gens))


def assemble_morse(beta1, beta2, K=DEFAULT_K, p=None, tol=DEGENERACY_TOL):
    """MorseReport from ``beta1 < beta2 < 0``."""
    if not beta1 < beta2:
        raise InvalidOrdering(f"need beta1 < beta2, got {beta1} >= {beta2}")
    if not beta2 < 0.0:
        raise InvalidOrdering(f"need beta2 < 0, got {beta2}")
    j = _integer_j(beta1)
    k_stop = j + 1
    decomposition = []
    for i, beta in ((1, beta1), (2, beta2)):
        for k in range(0, k_stop + 1):
            decomposition.append(DecompositionEntry(k, i, beta + k * k, 1 if k == 0 else 2))
    decomposition.sort(key=lambda e: (e.value, e.k, e.i))
    m_full = sum(e.multiplicity for e in decomposition if e.value < 0.0)

    neg1 = _negative_modes(beta1, k_stop)
    neg2 = _negative_modes(beta2, k_stop)
    m_k = {k: 2 + sum(1 for l in neg1 + neg2 if l % k == 0) for k in range(1, K + 1)}
    kernel = classify_degeneracy(beta1, beta2, tol)
    return MorseReport(
        p=p, beta1=beta1, beta2=beta2, j=j, m_full=m_full, m_rad=2, m_k=m_k,
        decomposition=tuple(decomposition), degenerate=kernel.degenerate, kernel=kernel,
    )


def morse_report(profile, K=DEFAULT_K, tol=DEGENERACY_TOL):
    """Convenience wrapper: weighted eigenvalues of ``profile`` then assembly."""
    from .eigen import weighted_radial_eigen

    b1 = weighted_radial_eigen(profile, 1).beta
    b2 = weighted_radial_eigen(profile, 2).beta
    return assemble_morse(b1, b2, K=K, p=profile.p, tol=tol)


@dataclass(frozen=True)
class ModeFunction:
    """Radial coefficient ``h`` of ``h(r) cos(k theta)`` (or sin) on a radial grid.

    ``h`` and ``dh`` are values and r-derivatives on ``profile.grid``.
    """

    k: int
    h: np.ndarray
    dh: np.ndarray
    kind: str = "cos"


def quadratic_form(profile, v):
    """Q_p(v) = ∫_B |∇v|^2 - p|u_p|^(p-1) v^2 for a finite sum of separated modes.

    Distinct (k, kind) pairs are orthogonal, so Q_p splits into radial
    integrals ``c_k ∫ (h'^2 + k^2 h^2 / r^2 - W h^2) r dr`` with
    ``c_0 = 2π`` and ``c_k = π`` otherwise.  Each integral is evaluated in
    log-radius, where the grid of the profile is adapted to the solution.
    """
    if isinstance(v, ModeFunction):
        v = [v]
    r = profile.grid[1:]
    t = np.log(r)
    wgt = profile.potential()
    total = 0.0
    seen = set()
    for mode in v:
        key = (mode.k, mode.kind if mode.k else "cos")
        if key in seen:
            raise ValueError(f"mode {key} given twice; merge coefficients first")
        seen.add(key)
        h = np.asarray(mode.h, dtype=float)[1:]
        ht = r * np.asarray(mode.dh, dtype=float)[1:]
        integrand = ht * ht + (mode.k * mode.k - wgt) * h * h
        c = 2.0 * pi if mode.k == 0 else pi
        total += c * float(simpson(integrand, x=t))
    return total
