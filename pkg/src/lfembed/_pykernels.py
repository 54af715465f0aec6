"""Pure numpy versions of the pairwise kernels.

These handle every dtype, including ``object`` arrays of Python ints used
when exact numerators do not fit in int64.
"""

from __future__ import annotations

import numpy as np


def pairwise_cheb(rows: np.ndarray) -> np.ndarray:
    """Matrix of sup-norm distances between the rows of ``rows``."""
    n = rows.shape[0]
    out = np.zeros((n, n), dtype=rows.dtype)
    if rows.shape[1] == 0:
        return out
    for i in range(n - 1):
        diff = np.abs(rows[i + 1 :] - rows[i]).max(axis=1)
        out[i, i + 1 :] = diff
        out[i + 1 :, i] = diff
    return out


def triangle_excess(dist: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """For each pair (i, k): max over j of d(i,k) - d(i,j) - d(j,k), and the argmax j."""
    n = dist.shape[0]
    exc = np.zeros((n, n), dtype=dist.dtype)
    wit = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        # cand[j, k] = d(i,k) - d(i,j) - d(j,k)
        cand = dist[i][None, :] - dist[i][:, None] - dist
        arg = np.argmax(cand, axis=0)
        exc[i] = cand[arg, np.arange(n)]
        wit[i] = arg
    return exc, wit
