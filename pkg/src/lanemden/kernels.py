"""Backend selection for the shooting kernels.

The compiled extension is used when importable; ``LANEMDEN_BACKEND=python``
forces the pure-Python twin (handy for debugging and for the benchmark).
"""

import os

from . import _shoot_py

STATUS_OK = 0
STATUS_HORIZON = 1
STATUS_UNDERFLOW = 2


def load(name=None):
    """Return the kernel module for ``name`` ("cython" or "python")."""
    if name is None:
        name = os.environ.get("LANEMDEN_BACKEND", "cython").lower()
    if name == "python":
        return _shoot_py
    try:
        from . import _shoot
    except ImportError:
        return _shoot_py
    return _shoot


_impl = load()
BACKEND = "python" if _impl is _shoot_py else "cython"

trajectory = _impl.trajectory
sample = _impl.sample
prufer = _impl.prufer
