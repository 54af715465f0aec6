# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled pairwise kernels.  Mirrors ``_pykernels`` for int64 and float64."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef fused num_t:
    cnp.int64_t
    double


def pairwise_cheb(num_t[:, ::1] rows):
    """Matrix of sup-norm distances between the rows of ``rows``."""
    cdef Py_ssize_t n = rows.shape[0], k = rows.shape[1]
    cdef Py_ssize_t i, j, c
    cdef num_t best, diff
    if num_t is double:
        out_arr = np.zeros((n, n), dtype=np.float64)
    else:
        out_arr = np.zeros((n, n), dtype=np.int64)
    cdef num_t[:, ::1] out = out_arr
    for i in range(n):
        for j in range(i + 1, n):
            best = 0
            for c in range(k):
                diff = rows[i, c] - rows[j, c]
                if diff < 0:
                    diff = -diff
                if diff > best:
                    best = diff
            out[i, j] = best
            out[j, i] = best
    return out_arr


def triangle_excess(num_t[:, ::1] dist):
    """For each pair (i, k): max over j of d(i,k) - d(i,j) - d(j,k), and the argmax j."""
    cdef Py_ssize_t n = dist.shape[0]
    cdef Py_ssize_t i, j, k, arg
    cdef num_t best, val
    if num_t is double:
        exc_arr = np.zeros((n, n), dtype=np.float64)
    else:
        exc_arr = np.zeros((n, n), dtype=np.int64)
    wit_arr = np.zeros((n, n), dtype=np.int64)
    cdef num_t[:, ::1] exc = exc_arr
    cdef cnp.int64_t[:, ::1] wit = wit_arr
    for i in range(n):
        for k in range(n):
            # first maximiser wins, as with numpy.argmax
            best = dist[i, k] - dist[i, 0] - dist[0, k]
            arg = 0
            for j in range(1, n):
                val = dist[i, k] - dist[i, j] - dist[j, k]
                if val > best:
                    best = val
                    arg = j
            exc[i, k] = best
            wit[i, k] = arg
    return exc_arr, wit_arr
