"""Kernel selection: compiled extension if present, numpy fallback otherwise.

Set MAXRANK_PURE_PYTHON=1 to force the fallback.  The Bellman sweeps agree
bitwise between the two implementations; link_sweep's dangling-mass return
may differ in the last bits because the fallback sums it with numpy's
pairwise reduction.
"""

from __future__ import annotations

import os

from . import _kernels_py
from ._kernels_py import page_bellman

if os.environ.get("MAXRANK_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

HAVE_COMPILED = bool(getattr(_impl, "HAVE_COMPILED", False))

link_sweep = _impl.link_sweep
bellman_sweep_jacobi = _impl.bellman_sweep_jacobi
bellman_sweep_jacobi_range = _impl.bellman_sweep_jacobi_range
bellman_sweep_gs = _impl.bellman_sweep_gs

__all__ = [
    "HAVE_COMPILED",
    "link_sweep",
    "bellman_sweep_jacobi",
    "bellman_sweep_jacobi_range",
    "bellman_sweep_gs",
    "page_bellman",
]
