"""Seeded generators for the test corpus.

Every family returns a valid :class:`MetricSpace`.  Random families are
reproducible per seed (numpy ``PCG64``).  Graph families use integer edge
weights so the resulting metrics are exact rationals.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .metric import InputError, MetricSpace, _l1_ball, from_graph

FAMILIES = ("grid", "random_graph", "random_tree", "uniform_points")

#: edge weights of the random graph families are drawn from 1..MAX_WEIGHT
MAX_WEIGHT = 9


def grid_edges(dim: int, radius: int) -> tuple[list, list]:
    pts = _l1_ball(dim, radius)
    names = [str(p) for p in pts]
    present = set(pts)
    edges = []
    for p in pts:
        for axis in range(dim):
            q = p[:axis] + (p[axis] + 1,) + p[axis + 1 :]
            if q in present:
                edges.append((str(p), str(q), 1))
    return names, edges


def grid(dim: int, radius: int, exact: bool = True) -> MetricSpace:
    """Lattice points of the l1 ball of ``radius`` in ``Z^dim`` with the grid metric."""
    if dim < 1 or radius < 1:
        raise InputError("grid needs dim >= 1 and radius >= 1")
    names, edges = grid_edges(dim, radius)
    origin = str((0,) * dim)
    space = from_graph(edges, origin, nodes=names, exact=exact)
    return MetricSpace(
        space.points, space.dist, space.basepoint, exact,
        {"family": "grid", "dim": dim, "radius": radius},
    )


def random_graph_edges(n: int, p: float, seed: int) -> tuple[list, int]:
    """Erdos-Renyi edges with integer weights, joined into one component.

    Components (ordered by smallest node) are chained by one extra edge each,
    drawn from the same generator.  Returns the edges and the number added.
    """
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(len(iu)) < p
    weights = rng.integers(1, MAX_WEIGHT + 1, size=len(iu))
    edges = [(int(a), int(b), int(w)) for a, b, w, k in zip(iu, ju, weights, keep) if k]
    if edges:
        a, b, _ = zip(*edges)
        adj = csr_matrix((np.ones(len(a)), (a, b)), shape=(n, n))
    else:
        adj = csr_matrix((n, n))
    ncomp, labels = connected_components(adj, directed=False)
    comps = sorted(
        (np.nonzero(labels == c)[0] for c in range(ncomp)), key=lambda idx: int(idx[0])
    )
    added = 0
    for left, right in zip(comps, comps[1:]):
        u = int(rng.choice(left))
        v = int(rng.choice(right))
        edges.append((u, v, int(rng.integers(1, MAX_WEIGHT + 1))))
        added += 1
    return edges, added


def random_graph(n: int, p: float, seed: int, exact: bool = True) -> MetricSpace:
    if n < 2 or not 0 <= p <= 1:
        raise InputError("random_graph needs n >= 2 and 0 <= p <= 1")
    edges, added = random_graph_edges(n, p, seed)
    space = from_graph(edges, 0, nodes=range(n), exact=exact)
    meta = {"family": "random_graph", "n": n, "p": p, "seed": seed,
            "connecting_edges_added": added}
    return MetricSpace(space.points, space.dist, space.basepoint, exact, meta)


def random_tree_edges(n: int, seed: int) -> list:
    """Random recursive tree: node i attaches to a uniform earlier node."""
    rng = np.random.default_rng(seed)
    return [
        (int(rng.integers(0, i)), i, int(rng.integers(1, MAX_WEIGHT + 1)))
        for i in range(1, n)
    ]


def random_tree(n: int, seed: int, exact: bool = True) -> MetricSpace:
    if n < 2:
        raise InputError("random_tree needs n >= 2")
    space = from_graph(random_tree_edges(n, seed), 0, nodes=range(n), exact=exact)
    meta = {"family": "random_tree", "n": n, "seed": seed}
    return MetricSpace(space.points, space.dist, space.basepoint, exact, meta)


#: coordinates of uniform_points live on this grid inside [0, 1)
COORD_RESOLUTION = 1000


def uniform_points(
    n: int, dim: int, seed: int, norm: str = "l1", exact: bool = True
) -> MetricSpace:
    """``n`` distinct points uniform on a 1/1000 grid in the unit cube.

    ``norm`` is ``"l1"`` or ``"linf"`` (rational distances) or ``"l2"``
    (irrational in general, so always float).
    """
    if n < 2 or dim < 1:
        raise InputError("uniform_points needs n >= 2 and dim >= 1")
    if norm not in ("l1", "linf", "l2"):
        raise InputError(f"unknown norm {norm!r}")
    if n > COORD_RESOLUTION**dim:
        raise InputError("more points requested than grid cells")
    rng = np.random.default_rng(seed)
    seen: set = set()
    coords: list = []
    while len(coords) < n:
        c = tuple(int(x) for x in rng.integers(0, COORD_RESOLUTION, size=dim))
        if c not in seen:
            seen.add(c)
            coords.append(c)
    x = np.array(coords, dtype=np.int64)
    diff = np.abs(x[:, None, :] - x[None, :, :])
    if norm == "l2":
        exact = False
        table = np.sqrt((diff.astype(np.float64) ** 2).sum(-1)) / COORD_RESOLUTION
    else:
        ints = diff.sum(-1) if norm == "l1" else diff.max(-1)
        table = [[Fraction(int(v), COORD_RESOLUTION) for v in row] for row in ints]
    meta = {"family": "uniform_points", "n": n, "dim": dim, "seed": seed, "norm": norm}
    return MetricSpace.from_matrix(range(n), table, 0, exact=exact, meta=meta)


def generate(family: str, exact: bool = True, **params) -> MetricSpace:
    """Dispatch by family name; see the individual generators for parameters."""
    if family == "grid":
        return grid(int(params["dim"]), int(params["radius"]), exact=exact)
    if family == "random_graph":
        return random_graph(int(params["n"]), float(params["p"]), int(params["seed"]), exact=exact)
    if family == "random_tree":
        return random_tree(int(params["n"]), int(params["seed"]), exact=exact)
    if family == "uniform_points":
        return uniform_points(
            int(params["n"]), int(params.get("dim", 2)), int(params["seed"]),
            norm=params.get("norm", "l1"), exact=exact,
        )
    raise InputError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
