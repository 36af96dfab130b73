"""Nodal radial solutions of the Lane-Emden problem on the unit disk.

Radial profiles, mode spectra and weighted eigenvalues of the linearised
operator, Morse indices, degenerate exponents, asymptotic regimes and the
non-radial branches bifurcating at the degenerate exponents.
"""

from .asym import validate_large_p, validate_near_one
from .branch import branch_switch, continue_branch, cone_membership, kernel_check, nodal_topology
from .eigen import annulus_radial_eigen, mode_spectrum, weighted_radial_eigen
from .errors import LaneEmdenError
from .kernels import BACKEND
from .morse import assemble_morse, morse_report
from .radial import solve_radial
from .scan import scan_degenerate, scan_level
from .specfun import bessel_j, bessel_zero, disk_eigenstructure

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "LaneEmdenError", "annulus_radial_eigen", "assemble_morse", "bessel_j",
    "bessel_zero", "branch_switch", "cone_membership", "continue_branch", "disk_eigenstructure",
    "kernel_check", "mode_spectrum", "morse_report", "nodal_topology", "scan_degenerate",
    "scan_level", "solve_radial", "validate_large_p", "validate_near_one",
    "weighted_radial_eigen",
]
