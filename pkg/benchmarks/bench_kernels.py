"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--sizes 50 100 200] [--repeat 3]

Prints one line per (kernel, dtype, size) with the best wall time of each
backend and the speedup.  Inputs are the packed distance tables and Frechet
block rows the package actually feeds to the kernels.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from lfembed import _pykernels, kernels
from lfembed.generators import random_graph
from lfembed.metric import ball, rescale_to_unit_gap


def best_of(fn, arg, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn(arg)
        best = min(best, time.perf_counter() - start)
    return best


def inputs(n: int):
    space, _ = rescale_to_unit_gap(random_graph(n, min(1.0, 3 / n), seed=n))
    table, _ = space.packed
    pts = ball(space, max(0, int(np.log2(float(max(space.norms))))))
    norms = space.norms
    rows = [[space.dist[t][s] - norms[s] for s in pts] for t in pts]
    from lfembed.numeric import integer_rows

    frechet, _ = integer_rows(rows, True)
    return {"int64": (table, frechet), "float64": (table.astype(np.float64), frechet.astype(np.float64))}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 100, 200])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not kernels.COMPILED:
        raise SystemExit("compiled kernels are not available; build with `pip install -e .`")
    from lfembed import _ckernels

    print(f"{'kernel':<16}{'dtype':<9}{'n':>6}{'cython s':>12}{'numpy s':>12}{'speedup':>9}")
    for n in args.sizes:
        for dtype, (table, frechet) in inputs(n).items():
            for name, arg in (("triangle_excess", table), ("pairwise_cheb", frechet)):
                c = best_of(getattr(_ckernels, name), np.ascontiguousarray(arg), args.repeat)
                p = best_of(getattr(_pykernels, name), arg, args.repeat)
                print(f"{name:<16}{dtype:<9}{n:>6}{c:>12.5f}{p:>12.5f}{p / c:>8.1f}x")


if __name__ == "__main__":
    main()
