"""Second-order finite differences in r for the mode-k linearised operator."""

import numpy as np
from scipy.linalg import eigh_tridiagonal


def mode_eigs_fd(profile, k, cells, count):
    """Lowest ``count`` eigenvalues of -(r h')'/r + k^2 h/r^2 - p|u|^(p-1) h, h(1) = 0."""
    h = 1.0 / cells
    p = profile.p
    if k == 0:
        # cell centres, zero flux through r = 0, ghost cell for h(1) = 0
        r = (np.arange(cells) + 0.5) * h
        faces = h * np.arange(cells + 1)
        diag = (faces[:-1] + faces[1:]) / h**2
        diag[-1] += faces[-1] / h**2
        off = -faces[1:-1] / h**2
    else:
        r = h * np.arange(1, cells)
        faces = h * (np.arange(cells) + 0.5)
        diag = (faces[:-1] + faces[1:]) / h**2 + k * k / r
        off = -faces[1:-1] / h**2
    u, _ = profile.evaluate(r)
    diag = diag - r * p * np.abs(u) ** (p - 1.0)
    # mass matrix diag(r): symmetrise with r^(-1/2)
    s = 1.0 / np.sqrt(r)
    return eigh_tridiagonal(diag * s * s, off * s[:-1] * s[1:], eigvals_only=True,
                            select="i", select_range=(0, count - 1))


def mode_eigs_extrapolated(profile, k, cells, count):
    """Richardson extrapolation of the O(h^2) scheme from ``cells`` and ``2 cells``."""
    coarse = mode_eigs_fd(profile, k, cells, count)
    fine = mode_eigs_fd(profile, k, 2 * cells, count)
    return (4.0 * fine - coarse) / 3.0
