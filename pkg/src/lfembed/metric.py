"""Finite pointed metric spaces: validation, ingestion, rescaling, balls,
amalgams and ball-growth profiles."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from . import kernels
from .numeric import FLOAT_SLACK, Number, coerce, integer_rows, pow2


class MetricStructureError(ValueError):
    """Distance table has the wrong shape or refers to missing points."""


class InputError(ValueError):
    """Ingested data cannot define a metric space (bad weights, disconnected graph, ...)."""


@dataclass(frozen=True)
class MetricSpace:
    """Finite metric space with a distinguished basepoint.

    Points are opaque identifiers; everything else in the package addresses
    them by position in ``points``.  ``exact`` selects rational or float
    arithmetic for every value derived from this space.
    """

    points: tuple
    dist: tuple
    basepoint: int = 0
    exact: bool = True
    meta: Mapping[str, Any] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        n = len(self.points)
        if len(self.dist) != n or any(len(row) != n for row in self.dist):
            raise MetricStructureError(
                f"distance table must be {n}x{n} to match the point list"
            )
        if n == 0:
            raise MetricStructureError("a metric space needs at least one point")
        if not 0 <= self.basepoint < n:
            raise MetricStructureError(f"basepoint index {self.basepoint} out of range")
        if len(set(self.points)) != n:
            raise MetricStructureError("point identifiers must be distinct")

    @classmethod
    def from_matrix(
        cls,
        points: Sequence[Hashable],
        matrix,
        basepoint: Hashable | int = 0,
        exact: bool = True,
        meta: Mapping[str, Any] | None = None,
        basepoint_is_name: bool = False,
    ) -> "MetricSpace":
        points = tuple(points)
        rows = [list(r) for r in matrix]
        if len(rows) != len(points) or any(len(r) != len(points) for r in rows):
            raise MetricStructureError(
                f"distance table must be {len(points)}x{len(points)} to match the point list"
            )
        dist = tuple(tuple(coerce(v, exact) for v in row) for row in rows)
        if basepoint_is_name:
            if basepoint not in points:
                raise MetricStructureError(f"basepoint {basepoint!r} is not a point")
            basepoint = points.index(basepoint)
        return cls(points, dist, int(basepoint), exact, dict(meta or {}))

    @property
    def size(self) -> int:
        return len(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def index(self, point: Hashable) -> int:
        try:
            return self._index[point]
        except KeyError:
            raise KeyError(f"unknown point {point!r}") from None

    @cached_property
    def _index(self) -> dict:
        return {p: i for i, p in enumerate(self.points)}

    def d(self, i: int, j: int) -> Number:
        return self.dist[i][j]

    @cached_property
    def norms(self) -> tuple:
        """``|t| = d(t, t0)`` for every point."""
        return self.dist[self.basepoint]

    @cached_property
    def array(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.dist], dtype=np.float64)

    @cached_property
    def packed(self) -> tuple[np.ndarray, int]:
        """Distance table as (integer or float array, common denominator)."""
        return integer_rows(self.dist, self.exact)

    def restrict(self, indices: Sequence[int], basepoint: int | None = None) -> "MetricSpace":
        """Subspace on ``indices``; the basepoint must be among them."""
        indices = list(indices)
        bp = self.basepoint if basepoint is None else basepoint
        if bp not in indices:
            raise MetricStructureError("restriction must keep the basepoint")
        return MetricSpace(
            tuple(self.points[i] for i in indices),
            tuple(tuple(self.dist[i][j] for j in indices) for i in indices),
            indices.index(bp),
            self.exact,
            dict(self.meta),
        )

    def with_basepoint(self, basepoint: int) -> "MetricSpace":
        return MetricSpace(self.points, self.dist, basepoint, self.exact, dict(self.meta))

    def scaled(self, factor: Number) -> "MetricSpace":
        return MetricSpace(
            self.points,
            tuple(tuple(v * factor for v in row) for row in self.dist),
            self.basepoint,
            self.exact,
            dict(self.meta),
        )

    def as_mode(self, exact: bool) -> "MetricSpace":
        if exact == self.exact:
            return self
        if exact and not all(isinstance(v, Fraction) for row in self.dist for v in row):
            dist = tuple(tuple(Fraction(v) for v in row) for row in self.dist)
        else:
            dist = tuple(tuple(coerce(v, exact) for v in row) for row in self.dist)
        return MetricSpace(self.points, dist, self.basepoint, exact, dict(self.meta))


# --------------------------------------------------------------------------
# validation
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    kind: str  # diagonal | negative | identity | asymmetry | triangle
    indices: tuple
    defect: Number

    def describe(self, space: MetricSpace) -> str:
        names = ", ".join(repr(space.points[i]) for i in self.indices)
        return f"{self.kind} violation at ({names}), defect {self.defect}"


@dataclass(frozen=True)
class Validation:
    ok: bool
    violations: tuple

    def __bool__(self) -> bool:
        return self.ok


def validate(space: MetricSpace) -> Validation:
    """Check every metric axiom on the full table.

    Triangle violations are reported once per offending pair ``(x, z)`` with
    ``x < z``, using the middle point ``y`` that maximises the defect
    ``d(x,z) - d(x,y) - d(y,z)``.  Float tables get a relative slack.
    """
    dist, _ = space.packed
    n = space.size
    if space.exact:
        tol = 0
    else:
        tol = FLOAT_SLACK * float(np.abs(dist).max(initial=0.0))
    out: list[Violation] = []
    for i in range(n):
        if dist[i, i] != 0:
            out.append(Violation("diagonal", (i,), space.dist[i][i]))
    for i, j in zip(*np.nonzero(dist < 0)):
        out.append(Violation("negative", (int(i), int(j)), space.dist[i][j]))
    asym = np.abs(dist - dist.T) > tol
    for i, j in zip(*np.nonzero(np.triu(asym, 1))):
        out.append(
            Violation("asymmetry", (int(i), int(j)), abs(space.dist[i][j] - space.dist[j][i]))
        )
    zero = np.triu(dist <= tol, 1) if not space.exact else np.triu(dist == 0, 1)
    for i, j in zip(*np.nonzero(zero)):
        out.append(Violation("identity", (int(i), int(j)), space.dist[i][j]))
    exc, wit = kernels.triangle_excess(dist)
    for i, k in zip(*np.nonzero(np.triu(exc > tol, 1))):
        i, k = int(i), int(k)
        j = int(wit[i, k])
        defect = space.dist[i][k] - space.dist[i][j] - space.dist[j][k]
        out.append(Violation("triangle", (i, j, k), defect))
    return Validation(not out, tuple(out))


# --------------------------------------------------------------------------
# ingestion
# --------------------------------------------------------------------------


def _graph_nodes(edges, nodes) -> list:
    order = list(nodes) if nodes is not None else []
    seen = set(order)
    for u, v, _ in edges:
        for x in (u, v):
            if x not in seen:
                if nodes is not None:
                    raise InputError(f"edge endpoint {x!r} is not a listed node")
                seen.add(x)
                order.append(x)
    return order


def _dijkstra_exact(n: int, adj: list[list[tuple[int, Fraction]]], src: int) -> list:
    best: list = [None] * n
    best[src] = Fraction(0)
    heap = [(Fraction(0), src)]
    done = [False] * n
    while heap:
        du, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, w in adj[u]:
            cand = du + w
            if best[v] is None or cand < best[v]:
                best[v] = cand
                heapq.heappush(heap, (cand, v))
    return best


def from_graph(
    edges: Iterable[Sequence],
    basepoint: Hashable,
    nodes: Sequence[Hashable] | None = None,
    exact: bool = True,
) -> MetricSpace:
    """Shortest-path metric of a connected graph with positive edge weights."""
    edges = [(u, v, coerce(w, exact)) for u, v, w in edges]
    order = _graph_nodes(edges, nodes)
    if basepoint not in order:
        raise InputError(f"basepoint {basepoint!r} is not a node of the graph")
    pos = {x: i for i, x in enumerate(order)}
    n = len(order)
    weight: dict[tuple[int, int], Number] = {}
    for u, v, w in edges:
        if w <= 0:
            raise InputError(f"edge ({u!r}, {v!r}) has nonpositive weight {w}")
        if u == v:
            continue
        a, b = sorted((pos[u], pos[v]))
        if (a, b) not in weight or w < weight[(a, b)]:
            weight[(a, b)] = w

    if exact:
        den = math.lcm(1, *(w.denominator for w in weight.values()))
        ints = {e: int(w * den) for e, w in weight.items()}
        # float64 sums of integers are exact below 2**53
        if sum(ints.values()) < 2**53:
            table = _scipy_paths(n, ints)
            dist = _finish(table, order, pos[basepoint], lambda x: Fraction(int(x), den))
        else:
            adj: list[list] = [[] for _ in range(n)]
            for (a, b), w in weight.items():
                adj[a].append((b, w))
                adj[b].append((a, w))
            rows = [_dijkstra_exact(n, adj, s) for s in range(n)]
            table = np.array([[math.inf if x is None else 0.0 for x in r] for r in rows])
            _check_connected(table, order, pos[basepoint])
            dist = tuple(tuple(r) for r in rows)
    else:
        table = _scipy_paths(n, weight)
        dist = _finish(table, order, pos[basepoint], float)
    return MetricSpace(tuple(order), dist, pos[basepoint], exact)


def _scipy_paths(n: int, weight: Mapping[tuple[int, int], Number]) -> np.ndarray:
    if not weight:
        table = np.full((n, n), np.inf)
        np.fill_diagonal(table, 0.0)
        return table
    rows, cols, vals = zip(*((a, b, float(w)) for (a, b), w in weight.items()))
    graph = csr_matrix((vals, (rows, cols)), shape=(n, n))
    return dijkstra(graph, directed=False)


def _check_connected(table: np.ndarray, order, bp: int) -> None:
    unreachable = np.nonzero(~np.isfinite(table[bp]))[0]
    if len(unreachable):
        raise InputError(
            f"graph is disconnected: node {order[int(unreachable[0])]!r} is unreachable "
            f"from basepoint {order[bp]!r}"
        )


def _finish(table: np.ndarray, order, bp: int, conv: Callable) -> tuple:
    _check_connected(table, order, bp)
    return tuple(tuple(conv(x) for x in row) for row in table)


# --------------------------------------------------------------------------
# rescaling and balls
# --------------------------------------------------------------------------


def rescale_to_unit_gap(space: MetricSpace) -> tuple[MetricSpace, Number]:
    """Dilate so that the nearest point to the basepoint sits at distance 2.

    Returns the dilated space and the factor used.  After this the closed
    ball of radius 1 around the basepoint is the basepoint alone.
    """
    if space.size < 2:
        raise InputError("a single-point space has nothing to embed")
    others = [v for i, v in enumerate(space.norms) if i != space.basepoint]
    gap = min(others)
    if gap <= 0:
        raise InputError("basepoint has a duplicate (zero distance to another point)")
    scale = (Fraction(2) if space.exact else 2.0) / gap
    if scale == 1:
        return space, scale
    return space.scaled(scale), scale


def ball_around(space: MetricSpace, center: int, radius: Number) -> tuple:
    """Closed ball ``{s : d(s, center) <= radius}`` as sorted indices."""
    row = space.dist[center]
    return tuple(i for i in range(space.size) if row[i] <= radius)


def ball(space: MetricSpace, n: int) -> tuple:
    """``B_n``: closed ball of radius ``2**(n+1)`` around the basepoint.

    Indices come ordered by ascending ``|s|`` with input order breaking ties;
    this order indexes the coordinates of every block over ``B_n``.
    """
    if n < 0 or int(n) != n:
        raise ValueError(f"shell index must be a nonnegative integer, got {n!r}")
    radius = pow2(int(n) + 1, space.exact)
    norms = space.norms
    inside = [i for i in range(space.size) if norms[i] <= radius]
    return tuple(sorted(inside, key=lambda i: (norms[i], i)))


# --------------------------------------------------------------------------
# amalgamation
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AmalgamSpace:
    """Disjoint union of pointed parts glued far apart.

    Part ``p`` (numbered from 1) keeps its own metric; points of different
    parts ``p != q`` sit at ``max(p, q, |x|_p, |y|_q)``.  ``members[p-1]``
    lists the indices of part ``p`` inside ``space``.
    """

    parts: tuple
    space: MetricSpace
    members: tuple

    def part_of(self, index: int) -> int:
        for p, idx in enumerate(self.members, start=1):
            if index in idx:
                return p
        raise KeyError(index)

    def isometry_defects(self) -> list:
        """Per part: max |d(composite) - d(part)| over pairs of that part."""
        out = []
        for part, idx in zip(self.parts, self.members):
            worst = 0
            for a, ia in enumerate(idx):
                for b, ib in enumerate(idx):
                    worst = max(worst, abs(self.space.dist[ia][ib] - part.dist[a][b]))
            out.append(worst)
        return out


def amalgamate(parts: Sequence[MetricSpace]) -> AmalgamSpace:
    if not parts:
        raise InputError("amalgamation needs at least one part")
    exact = all(p.exact for p in parts)
    parts = tuple(p.as_mode(exact) for p in parts)
    points: list = []
    members = []
    where: list[tuple[int, int]] = []  # global index -> (part number, local index)
    for p, part in enumerate(parts, start=1):
        start = len(points)
        for a, name in enumerate(part.points):
            points.append(f"{p}:{name}")
            where.append((p, a))
        members.append(tuple(range(start, len(points))))
    one = Fraction(1) if exact else 1.0
    n = len(points)
    rows = []
    for i in range(n):
        p, a = where[i]
        mp = parts[p - 1]
        row = []
        for j in range(n):
            q, b = where[j]
            if p == q:
                row.append(mp.dist[a][b])
            else:
                mq = parts[q - 1]
                row.append(max(p * one, q * one, mp.norms[a], mq.norms[b]))
        rows.append(tuple(row))
    space = MetricSpace(
        tuple(points), tuple(rows), members[0][parts[0].basepoint], exact, {"parts": len(parts)}
    )
    return AmalgamSpace(parts, space, tuple(members))


# --------------------------------------------------------------------------
# locally finite access and ball growth
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GrowableSpace:
    """A locally finite space known only through its balls around ``t0``.

    ``ball_oracle(r)`` returns the finite ball ``B(t0, r)`` as a
    :class:`MetricSpace` whose basepoint is ``t0``.
    """

    ball_oracle: Callable[[Number], MetricSpace]
    basepoint: Hashable

    def ball(self, radius: Number) -> MetricSpace:
        out = self.ball_oracle(radius)
        if out.points[out.basepoint] != self.basepoint:
            raise MetricStructureError("ball oracle returned a ball around the wrong point")
        return out

    @classmethod
    def from_space(cls, space: MetricSpace) -> "GrowableSpace":
        def oracle(r):
            return space.restrict(ball_around(space, space.basepoint, r))

        return cls(oracle, space.points[space.basepoint])


def lattice(dim: int, exact: bool = True) -> GrowableSpace:
    """``Z^dim`` with the l1 (grid graph) metric, origin as basepoint."""
    origin = (0,) * dim

    def oracle(r):
        pts = _l1_ball(dim, int(math.floor(r)))
        table = [[sum(abs(a - b) for a, b in zip(x, y)) for y in pts] for x in pts]
        return MetricSpace.from_matrix(
            [str(x) for x in pts], table, pts.index(origin), exact=exact
        )

    return GrowableSpace(oracle, str(origin))


def _l1_ball(dim: int, radius: int) -> list:
    if dim == 0:
        return [()]
    out = []
    for first in range(-radius, radius + 1):
        for rest in _l1_ball(dim - 1, radius - abs(first)):
            out.append((first,) + rest)
    out.sort(key=lambda x: (sum(abs(c) for c in x), x))
    return out


@dataclass(frozen=True)
class GeometryProfile:
    radii: tuple
    counts: tuple  # C(r): largest ball of radius r over the sampled centers


def geometry_profile(
    space: MetricSpace | GrowableSpace,
    radii: Sequence[Number],
    center_radius: Number | None = None,
) -> GeometryProfile:
    """Largest closed-ball cardinality ``C(r)`` for each radius.

    For a :class:`GrowableSpace` the centers range over ``B(t0, center_radius)``
    (default: the largest radius) and the oracle is asked for a ball large
    enough that every counted ball is complete.
    """
    radii = list(radii)
    if any(r <= 0 for r in radii) or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be positive and strictly increasing")
    if not radii:
        return GeometryProfile((), ())
    if isinstance(space, GrowableSpace):
        reach = radii[-1] if center_radius is None else center_radius
        whole = space.ball(reach + radii[-1])
        centers = list(ball_around(whole, whole.basepoint, reach))
    else:
        whole = space
        centers = list(range(space.size))
    table, den = whole.packed
    sub = table[centers]
    counts = []
    for r in radii:
        if whole.exact:
            # integer entries compare exactly against floor(r * den)
            limit = math.floor(Fraction(r) * den)
        else:
            limit = float(r)
        counts.append(int((sub <= limit).sum(axis=1).max()))
    return GeometryProfile(tuple(radii), tuple(counts))
