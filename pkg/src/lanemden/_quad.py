"""Quintic Hermite reconstruction and Gauss-Legendre quadrature on a node grid."""

import numpy as np

_X, _W = np.polynomial.legendre.leggauss(8)
GL_S = 0.5 * (_X + 1.0)
GL_W = 0.5 * _W


def _basis(s):
    return (
        1 - 10 * s**3 + 15 * s**4 - 6 * s**5,
        s - 6 * s**3 + 8 * s**4 - 3 * s**5,
        0.5 * (s**2 - 3 * s**3 + 3 * s**4 - s**5),
        10 * s**3 - 15 * s**4 + 6 * s**5,
        -4 * s**3 + 7 * s**4 - 3 * s**5,
        0.5 * (s**3 - 2 * s**4 + s**5),
    )


_B = _basis(GL_S[None, :])


def nodes(t):
    """Quadrature abscissae, shape (len(t) - 1, 8), and matching weights."""
    h = np.diff(t)[:, None]
    return t[:-1, None] + h * GL_S[None, :], h * GL_W[None, :]


def reconstruct(t, y, yt, ytt):
    """Values of the quintic Hermite interpolant at :func:`nodes`."""
    h = np.diff(t)[:, None]
    h00, h10, h20, h01, h11, h21 = _B
    return (h00 * y[:-1, None] + h10 * h * yt[:-1, None] + h20 * h**2 * ytt[:-1, None]
            + h01 * y[1:, None] + h11 * h * yt[1:, None] + h21 * h**2 * ytt[1:, None])
