"""Frechet-type coordinate maps ``t -> (d(s,t) - |s|)_s``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .metric import MetricSpace, ball
from .numeric import Number


class BallDomainError(ValueError):
    """A Frechet map was evaluated at a point outside its ball."""


class BlockStructureError(ValueError):
    """Vectors combined over differently indexed balls."""


@dataclass(frozen=True)
class CoordVector:
    """Element of ``l_inf(B)``: one value per point of the ordered index set ``ball_points``."""

    ball_points: tuple
    values: tuple

    def __post_init__(self):
        if len(self.values) != len(self.ball_points):
            raise ValueError("one value per ball point is required")

    def norm(self) -> Number:
        return max((abs(v) for v in self.values), default=0)

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values)

    def __getitem__(self, point: int) -> Number:
        return self.values[self.ball_points.index(point)]

    def _check(self, other: "CoordVector") -> None:
        if other.ball_points != self.ball_points:
            raise BlockStructureError("coordinate vectors are indexed by different balls")

    def __add__(self, other: "CoordVector") -> "CoordVector":
        self._check(other)
        return CoordVector(self.ball_points, tuple(a + b for a, b in zip(self.values, other.values)))

    def __sub__(self, other: "CoordVector") -> "CoordVector":
        self._check(other)
        return CoordVector(self.ball_points, tuple(a - b for a, b in zip(self.values, other.values)))

    def __mul__(self, alpha: Number) -> "CoordVector":
        return CoordVector(self.ball_points, tuple(alpha * v for v in self.values))

    __rmul__ = __mul__

    def __neg__(self) -> "CoordVector":
        return CoordVector(self.ball_points, tuple(-v for v in self.values))


def frechet_values(space: MetricSpace, index_set: Sequence[int], t: int) -> tuple:
    row = space.dist[t]
    norms = space.norms
    return tuple(row[s] - norms[s] for s in index_set)


def phi(space: MetricSpace, n: int, t: int, ball_points: Sequence[int] | None = None) -> CoordVector:
    """``phi_n(t)`` over ``B_n``; ``t`` must lie in ``B_n``.

    ``ball_points`` may pass a precomputed ``ball(space, n)`` to skip the
    ball computation.
    """
    pts = tuple(ball(space, n)) if ball_points is None else tuple(ball_points)
    if t not in pts:
        raise BallDomainError(
            f"point {space.points[t]!r} (|t| = {space.norms[t]}) is outside B_{n}"
        )
    return CoordVector(pts, frechet_values(space, pts, t))


def kuratowski(space: MetricSpace) -> dict:
    """Isometric embedding of the whole space into ``l_inf(M)``.

    Coordinates follow the same ordering as balls: ascending ``|s|``, then
    input order.
    """
    norms = space.norms
    pts = tuple(sorted(range(space.size), key=lambda i: (norms[i], i)))
    return {t: CoordVector(pts, frechet_values(space, pts, t)) for t in range(space.size)}


def support_size(v: CoordVector) -> int:
    """Number of coordinates a vector touches (nonzero entries)."""
    return sum(1 for x in v.values if x != 0)
