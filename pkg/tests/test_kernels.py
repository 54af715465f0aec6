"""The compiled kernels and the numpy fallback must agree bit for bit."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lfembed import _pykernels, kernels

needs_compiled = pytest.mark.skipif(not kernels.COMPILED, reason="compiled kernels not built")

ints = arrays(np.int64, st.tuples(st.integers(1, 12), st.integers(0, 6)), elements=st.integers(-10**6, 10**6))
floats = arrays(np.float64, st.tuples(st.integers(1, 12), st.integers(0, 6)),
                elements=st.floats(-1e6, 1e6, allow_nan=False))


def _square(a):
    n = a.shape[0]
    b = np.resize(a, (n, n))
    return np.abs(b + b.T)


@needs_compiled
@settings(max_examples=60, deadline=None)
@given(st.one_of(ints, floats))
def test_pairwise_cheb_backends_agree(a):
    from lfembed import _ckernels

    assert np.array_equal(_ckernels.pairwise_cheb(np.ascontiguousarray(a)), _pykernels.pairwise_cheb(a))


@needs_compiled
@settings(max_examples=60, deadline=None)
@given(st.one_of(ints, floats))
def test_triangle_excess_backends_agree(a):
    from lfembed import _ckernels

    d = np.ascontiguousarray(_square(a)) if a.size else np.zeros((1, 1), a.dtype)
    ce, cw = _ckernels.triangle_excess(d)
    pe, pw = _pykernels.triangle_excess(d)
    assert np.array_equal(ce, pe) and np.array_equal(cw, pw)


def test_pairwise_cheb_by_hand():
    a = np.array([[0, 0], [3, -1], [1, 5]], dtype=np.int64)
    expected = np.array([[0, 3, 5], [3, 0, 6], [5, 6, 0]])
    assert np.array_equal(kernels.pairwise_cheb(a), expected)
    assert np.array_equal(_pykernels.pairwise_cheb(a.astype(object)), expected)


def test_triangle_excess_by_hand():
    d = np.array([[0, 1, 10], [1, 0, 1], [10, 1, 0]], dtype=np.int64)
    exc, wit = kernels.triangle_excess(d)
    assert exc[0, 2] == 8 and wit[0, 2] == 1


def test_backend_is_reported():
    assert kernels.BACKEND in ("cython", "numpy")
    assert kernels.COMPILED == (kernels.BACKEND == "cython")


def test_fallback_selected_at_import_gives_identical_reports():
    import os
    import subprocess
    import sys

    script = (
        "from lfembed import kernels, build_embedding, distortion, certify_cases\n"
        "from lfembed.generators import random_tree\n"
        "e = build_embedding(random_tree(40, 2), 'random', 3)\n"
        "r = distortion(e)\n"
        "print(kernels.BACKEND, r.lip, r.colip, certify_cases(e, keep=False).checks_run)\n"
    )
    outs = {}
    for pure in ("0", "1"):
        env = dict(os.environ, LFEMBED_PURE=pure)
        res = subprocess.run([sys.executable, "-c", script], capture_output=True, text=True, env=env, check=True)
        backend, *rest = res.stdout.split()
        outs[backend] = rest
    assert "numpy" in outs
    assert len(set(map(tuple, outs.values()))) == 1
