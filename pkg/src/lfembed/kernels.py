"""Dispatch for the O(n^2 k) and O(n^3) kernels.

The compiled extension is used when it imported and the array has a dtype it
was built for (int64 or float64); everything else goes to the numpy
fallback.  Set ``LFEMBED_PURE=1`` to force the fallback.
"""

from __future__ import annotations

import os

import numpy as np

from . import _pykernels

try:
    if os.environ.get("LFEMBED_PURE", "") not in ("", "0"):
        raise ImportError("compiled kernels disabled by LFEMBED_PURE")
    from . import _ckernels
except ImportError:
    _ckernels = None

COMPILED = _ckernels is not None
BACKEND = "cython" if COMPILED else "numpy"

_NATIVE = (np.dtype(np.int64), np.dtype(np.float64))


def _native(arr: np.ndarray) -> bool:
    return COMPILED and arr.dtype in _NATIVE


def pairwise_cheb(rows: np.ndarray) -> np.ndarray:
    if _native(rows):
        return _ckernels.pairwise_cheb(np.ascontiguousarray(rows))
    return _pykernels.pairwise_cheb(rows)


def triangle_excess(dist: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if _native(dist):
        return _ckernels.triangle_excess(np.ascontiguousarray(dist))
    return _pykernels.triangle_excess(dist)
