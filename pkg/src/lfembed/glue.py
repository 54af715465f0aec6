"""The interpolated embedding.

A point with ``2**n <= |t| < 2**(n+1)`` is sent to

    f(t) = lam * T_n(phi_n(t)) + (1 - lam) * T_{n+1}(phi_{n+1}(t)),
    lam  = (2**(n+1) - |t|) / 2**n,

the first term living in block ``n`` and the second in block ``n+1``; the
basepoint goes to 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .blocks import BlockOperator, BlockVector, make_operators
from .frechet import CoordVector, frechet_values
from .metric import MetricSpace, ball, rescale_to_unit_gap
from .numeric import Number, floor_log2, is_power_of_two, pow2


class RescaleError(ValueError):
    """A non-basepoint lies within distance 1 of the basepoint."""


class MissingOperatorError(ValueError):
    """No operator was supplied for a block the construction needs."""


@dataclass(frozen=True)
class ShellAssignment:
    """Shell index and interpolation weight of every non-basepoint."""

    shell: dict
    weight: dict

    @property
    def top_shell(self) -> int:
        return max(self.shell.values(), default=0)

    @property
    def top_block(self) -> int:
        """Highest block index the construction writes to."""
        return self.top_shell + 1

    def members(self, k: int) -> list:
        """Points with a block-``k`` term: ``(index, weight)`` for shells ``k`` and ``k-1``."""
        out = []
        for t, n in self.shell.items():
            if n == k:
                out.append((t, self.weight[t]))
            elif n == k - 1:
                out.append((t, 1 - self.weight[t]))
        return out


def shell_of(norm: Number) -> tuple[int, Number]:
    n = floor_log2(norm)
    exact = not isinstance(norm, float)
    return n, (pow2(n + 1, exact) - norm) / pow2(n, exact)


def assign_shells(space: MetricSpace) -> ShellAssignment:
    shell, weight = {}, {}
    for t, norm in enumerate(space.norms):
        if t == space.basepoint:
            continue
        if norm < 1:
            raise RescaleError(
                f"point {space.points[t]!r} has |t| = {norm} < 1; rescale the space first"
            )
        shell[t], weight[t] = shell_of(norm)
    return ShellAssignment(shell, weight)


@dataclass(frozen=True, eq=False)
class Embedding:
    """Images of all points of ``space`` (already rescaled by ``scale``)."""

    space: MetricSpace
    operators: tuple
    shells: ShellAssignment
    image: dict
    scale: Number = 1
    mode: str | None = None
    seed: int | None = None
    meta: dict = field(default_factory=dict, compare=False)

    @cached_property
    def balls(self) -> dict:
        return {k: ball(self.space, k) for k in range(len(self.operators))}

    def frechet_block(self, k: int, t: int, weight: Number = 1) -> CoordVector:
        """``weight * f_k(t) = weight * T_k(phi_k(t))`` over ``B_k``."""
        pts = self.balls[k]
        values = frechet_values(self.space, pts, t)
        return CoordVector(pts, self.operators[k].apply(values, weight))

    def index(self, point) -> int:
        return self.space.index(point)


def _check_operators(space: MetricSpace, operators: Sequence[BlockOperator], top: int) -> None:
    for k in range(top + 1):
        if k >= len(operators):
            raise MissingOperatorError(f"no operator for block {k} (need blocks 0..{top})")
        op = operators[k]
        if op.n != k:
            raise MissingOperatorError(f"operator at position {k} is for block {op.n}")
        size = len(ball(space, k))
        if op.size != size:
            raise MissingOperatorError(
                f"operator for block {k} has size {op.size}, but B_{k} has {size} points"
            )


def embed(
    space: MetricSpace,
    operators: Sequence[BlockOperator],
    scale: Number = 1,
    mode: str | None = None,
    seed: int | None = None,
) -> Embedding:
    """Build the image of every point.  ``space`` must satisfy ``B(t0, 1) = {t0}``."""
    shells = assign_shells(space)
    _check_operators(space, operators, shells.top_block)
    emb = Embedding(space, tuple(operators), shells, {}, scale, mode, seed)
    blocks: dict = {t: {} for t in range(space.size)}
    for k in range(shells.top_block + 1):
        for t, w in shells.members(k):
            if w != 0:
                blocks[t][k] = emb.frechet_block(k, t, w)
    emb.image.update({t: BlockVector(b) for t, b in blocks.items()})
    return emb


def build_embedding(space: MetricSpace, mode: str = "identity", seed: int | None = None) -> Embedding:
    """Rescale, draw operators and embed in one call."""
    scaled, scale = rescale_to_unit_gap(space)
    ops = make_operators(scaled, mode, seed)
    return embed(scaled, ops, scale, mode, seed)


def evaluate(emb: Embedding, t: int) -> BlockVector:
    try:
        return emb.image[t]
    except KeyError:
        raise KeyError(f"no point with index {t!r} in the embedding") from None


def pairwise_image_distance(emb: Embedding, t: int, s: int) -> Number:
    return (evaluate(emb, t) - evaluate(emb, s)).norm()


@dataclass(frozen=True)
class BoundaryVerdict:
    ok: bool
    checked: tuple  # points sitting on a seam 2**m, m >= 2
    single_shell: tuple  # points at |t| = 2: only shell 1 applies
    mismatches: tuple


def boundary_consistency_check(space: MetricSpace, operators: Sequence[BlockOperator]) -> BoundaryVerdict:
    """Evaluate points at ``|t| = 2**m`` with both adjacent shell formulas.

    Shell ``m-1`` gives weight 0 on ``f_{m-1}`` and 1 on ``f_m``; shell ``m``
    gives weight 1 on ``f_m`` and 0 on ``f_{m+1}``.  Both must agree with each
    other and with the image the embedding stores.
    """
    emb = embed(space, operators)
    exact = space.exact
    checked, single, bad = [], [], []
    for t, norm in enumerate(space.norms):
        if t == space.basepoint or not is_power_of_two(norm):
            continue
        m = floor_log2(norm)
        if m < 2:
            single.append(t)
            continue
        lo = m - 1
        lam_lo = (pow2(lo + 1, exact) - norm) / pow2(lo, exact)
        lam_hi = (pow2(m + 1, exact) - norm) / pow2(m, exact)
        from_below = BlockVector(
            {lo: emb.frechet_block(lo, t, lam_lo), m: emb.frechet_block(m, t, 1 - lam_lo)}
        )
        from_above = BlockVector(
            {m: emb.frechet_block(m, t, lam_hi), m + 1: emb.frechet_block(m + 1, t, 1 - lam_hi)}
        )
        checked.append(t)
        if not (from_below == from_above == emb.image[t]):
            bad.append(t)
    return BoundaryVerdict(not bad, tuple(checked), tuple(single), tuple(bad))


def seam_space(norm: int, exact: bool = True) -> MetricSpace:
    """Two-point space ``{t0, t}`` with ``|t| = norm``, for seam checks."""
    return MetricSpace.from_matrix(["t0", "t"], [[0, norm], [norm, 0]], 0, exact=exact)
