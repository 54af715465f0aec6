"""The target space: a sup-sum of finite-dimensional blocks ``l_inf(B_n)``.

Block ``n`` carries an invertible operator ``T_n`` with certified bounds
``conorm * |u| <= |T_n u| <= norm * |u|`` in the sup norm.  The canonical
projections onto one block (``project``) or onto blocks ``0..n``
(``partial_sum``) have norm 1 in this model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .frechet import BlockStructureError, CoordVector
from .numeric import Number

__all__ = [
    "BlockStructureError",
    "BlockVector",
    "BlockOperator",
    "OperatorCertificationError",
    "OPERATOR_MODES",
    "make_operator",
    "make_operators",
    "project",
    "partial_sum",
]

OPERATOR_MODES = ("identity", "half", "random")

# random mode: diagonal entries in [3/4, 1], u entries in [-1, 1],
# sum |v| <= 1/3; numerators over these denominators
_DIAG_DEN = 64
_U_DEN = 64
_MAX_ATTEMPTS = 200


class OperatorCertificationError(RuntimeError):
    """Random operator sampling never met the ``1/2 <= conorm <= norm <= 1`` sandwich."""


@dataclass(frozen=True, eq=False)
class BlockVector:
    """Element of the block sum: sparse map from block index to coordinates.

    Missing blocks are zero.  The norm is the largest block sup-norm.
    """

    blocks: Mapping[int, CoordVector] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "blocks", dict(sorted(self.blocks.items())))

    def norm(self) -> Number:
        return max((b.norm() for b in self.blocks.values()), default=0)

    def nonzero(self) -> dict:
        return {n: b for n, b in self.blocks.items() if not b.is_zero()}

    def __eq__(self, other) -> bool:
        if not isinstance(other, BlockVector):
            return NotImplemented
        return self.nonzero() == other.nonzero()

    def __hash__(self):
        return hash(tuple(self.nonzero().items()))

    def _combine(self, other: "BlockVector", sign: int) -> "BlockVector":
        out = dict(self.blocks)
        for n, b in other.blocks.items():
            if n in out:
                out[n] = out[n] + b if sign > 0 else out[n] - b
            else:
                out[n] = b if sign > 0 else -b
        return BlockVector(out)

    def __add__(self, other: "BlockVector") -> "BlockVector":
        return self._combine(other, 1)

    def __sub__(self, other: "BlockVector") -> "BlockVector":
        return self._combine(other, -1)

    def __mul__(self, alpha: Number) -> "BlockVector":
        return BlockVector({n: b * alpha for n, b in self.blocks.items()})

    __rmul__ = __mul__

    def __neg__(self) -> "BlockVector":
        return self * -1


def project(z: BlockVector, n: int) -> BlockVector:
    """Keep block ``n`` only."""
    return BlockVector({n: z.blocks[n]} if n in z.blocks else {})


def partial_sum(z: BlockVector, n: int) -> BlockVector:
    """Keep blocks ``0..n``; ``n`` must be nonnegative."""
    if n < 0:
        raise ValueError("partial sums start at block 0")
    return BlockVector({k: b for k, b in z.blocks.items() if k <= n})


@dataclass(frozen=True)
class BlockOperator:
    """Invertible operator on ``l_inf(B_n)`` with exact sup-norm certificates.

    ``kind`` is ``identity``, ``half`` (one half of the identity) or
    ``random``.  A random operator is ``T = M / |M|`` with

        M = S D (I + u v^T)

    where ``S`` is a signed permutation, ``D`` a positive diagonal and
    ``u v^T`` a rank-one perturbation.  Max-abs-row-sums of ``M`` and of
    ``M^-1 = (I - u v^T / (1 + v.u)) D^-1 S^-1`` have closed forms, so
    ``norm_bound = |T| = 1`` and ``conorm_bound = 1 / |T^-1|`` are exact.
    """

    n: int
    size: int
    kind: str
    norm_bound: Fraction
    conorm_bound: Fraction
    seed: int | None = None
    attempts: int = 0
    perm: tuple = ()
    signs: tuple = ()
    diag: tuple = ()  # integer numerators over _DIAG_DEN
    u: tuple = ()  # integer numerators over _U_DEN
    v: tuple = ()  # integer numerators over v_den
    v_den: int = 1
    scale: Fraction = Fraction(1)  # 1 / |M|

    # -- application ---------------------------------------------------------

    def apply(self, values: Sequence[Number], weight: Number = 1) -> tuple:
        """``weight * T(values)``; exact for Fractions, vectorised for floats."""
        if len(values) != self.size:
            raise BlockStructureError(
                f"operator on block {self.n} has size {self.size}, got {len(values)} values"
            )
        if not values:
            return ()
        if isinstance(values[0], Fraction) and isinstance(weight, (int, Fraction)):
            return self._apply_exact(values, Fraction(weight))
        return tuple(self._apply_float(np.asarray(values, dtype=np.float64), float(weight)))

    def _apply_exact(self, values, weight: Fraction) -> tuple:
        if self.kind in ("identity", "half"):
            w = weight if self.kind == "identity" else weight / 2
            return tuple(w * x for x in values)
        q = math.lcm(1, *(x.denominator for x in values))
        xs = [x.numerator * (q // x.denominator) for x in values]
        alpha = sum(vj * xj for vj, xj in zip(self.v, xs))
        ruv = _U_DEN * self.v_den
        ys = [xi * ruv + ui * alpha for xi, ui in zip(xs, self.u)]
        zs = [di * yi for di, yi in zip(self.diag, ys)]
        c = weight * self.scale
        den = q * ruv * _DIAG_DEN * c.denominator
        num = c.numerator
        return tuple(
            Fraction(s * zs[p] * num, den) for s, p in zip(self.signs, self.perm)
        )

    def _apply_float(self, x: np.ndarray, weight: float) -> np.ndarray:
        if self.kind == "identity":
            return weight * x
        if self.kind == "half":
            return (weight / 2) * x
        u, v, diag = self._float_factors
        y = x + u * float(v @ x)
        z = diag * y
        return (weight * float(self.scale)) * (np.asarray(self.signs) * z[list(self.perm)])

    @property
    def _float_factors(self):
        return (
            np.asarray(self.u, dtype=np.float64) / _U_DEN,
            np.asarray(self.v, dtype=np.float64) / self.v_den,
            np.asarray(self.diag, dtype=np.float64) / _DIAG_DEN,
        )

    # -- dense forms, for inspection and independent checks -------------------

    def _factors_exact(self):
        u = [Fraction(x, _U_DEN) for x in self.u]
        v = [Fraction(x, self.v_den) for x in self.v]
        d = [Fraction(x, _DIAG_DEN) for x in self.diag]
        return u, v, d

    def matrix(self) -> list:
        """Dense matrix of ``T`` as nested lists of Fractions."""
        k = self.size
        if self.kind in ("identity", "half"):
            a = Fraction(1) if self.kind == "identity" else Fraction(1, 2)
            return [[a if i == j else Fraction(0) for j in range(k)] for i in range(k)]
        u, v, d = self._factors_exact()
        base = [
            [d[i] * ((1 if i == j else 0) + u[i] * v[j]) for j in range(k)] for i in range(k)
        ]
        return [
            [self.scale * self.signs[i] * base[self.perm[i]][j] for j in range(k)]
            for i in range(k)
        ]

    def inverse_matrix(self) -> list:
        """Dense matrix of ``T^-1`` from the closed-form inverse."""
        k = self.size
        if self.kind in ("identity", "half"):
            a = Fraction(1) if self.kind == "identity" else Fraction(2)
            return [[a if i == j else Fraction(0) for j in range(k)] for i in range(k)]
        u, v, d = self._factors_exact()
        beta = 1 / (1 + sum(a * b for a, b in zip(u, v)))
        a_mat = [
            [((1 if i == j else 0) - beta * u[i] * v[j]) / d[j] for j in range(k)]
            for i in range(k)
        ]
        # M^-1 = A S^-1, and (S^-1)[m, i] = signs[i] exactly when m = perm[i]
        out = [[Fraction(0)] * k for _ in range(k)]
        for i in range(k):
            m = self.perm[i]
            for j in range(k):
                out[j][i] = a_mat[j][m] * self.signs[i] / self.scale
        return out

    def certified(self) -> bool:
        return Fraction(1, 2) <= self.conorm_bound <= self.norm_bound <= 1


def max_row_sum(matrix: Sequence[Sequence[Number]]) -> Number:
    """Operator norm ``l_inf -> l_inf``: largest absolute row sum."""
    return max((sum(abs(x) for x in row) for row in matrix), default=0)


def _random_norms(diag, u, v) -> tuple[Fraction, Fraction]:
    """Exact ``|M|`` and ``|M^-1|`` for ``M = S D (I + u v^T)``."""
    s_v = sum(abs(x) for x in v)
    norm = max(
        d * (abs(1 + ui * vi) + abs(ui) * (s_v - abs(vi)))
        for d, ui, vi in zip(diag, u, v)
    )
    beta = 1 / (1 + sum(a * b for a, b in zip(u, v)))
    s_vd = sum(abs(vi) / d for vi, d in zip(v, diag))
    inv = max(
        abs(1 - beta * ui * vi) / d + abs(beta * ui) * (s_vd - abs(vi) / d)
        for d, ui, vi in zip(diag, u, v)
    )
    return norm, inv


def make_operator(n: int, size: int, mode: str, seed: int | None = None) -> BlockOperator:
    if mode == "identity":
        return BlockOperator(n, size, "identity", Fraction(1), Fraction(1))
    if mode == "half":
        return BlockOperator(n, size, "half", Fraction(1, 2), Fraction(1, 2))
    if mode != "random":
        raise ValueError(f"unknown operator mode {mode!r}; choose from {OPERATOR_MODES}")
    if seed is None:
        raise ValueError("random operators need a seed")
    rng = np.random.default_rng([int(seed), int(n)])
    v_den = 192 * size
    tried = []
    for attempt in range(1, _MAX_ATTEMPTS + 1):
        perm = tuple(int(x) for x in rng.permutation(size))
        signs = tuple(int(x) for x in rng.choice([-1, 1], size=size))
        diag_n = tuple(int(x) for x in rng.integers(48, _DIAG_DEN + 1, size=size))
        u_n = tuple(int(x) for x in rng.integers(-_U_DEN, _U_DEN + 1, size=size))
        g = int(rng.integers(0, 65))
        v_n = tuple(int(x) for x in rng.integers(-g, g + 1, size=size))
        diag = [Fraction(x, _DIAG_DEN) for x in diag_n]
        u = [Fraction(x, _U_DEN) for x in u_n]
        v = [Fraction(x, v_den) for x in v_n]
        norm, inv = _random_norms(diag, u, v)
        kappa = norm * inv
        if kappa <= 2:
            return BlockOperator(
                n, size, "random", Fraction(1), 1 / kappa, seed=int(seed), attempts=attempt,
                perm=perm, signs=signs, diag=diag_n, u=u_n, v=v_n, v_den=v_den, scale=1 / norm,
            )
        tried.append(float(kappa))
    raise OperatorCertificationError(
        f"block {n}: no sample with condition number <= 2 after {_MAX_ATTEMPTS} attempts; "
        f"condition numbers tried: {', '.join(f'{k:.4f}' for k in tried[:10])} ..."
    )


def make_operators(space, mode: str, seed: int | None = None, top: int | None = None) -> tuple:
    """One operator per block ``0..top``.

    ``top`` defaults to one past the largest occupied shell, the range the
    glue map needs.
    """
    from .glue import assign_shells
    from .metric import ball

    if top is None:
        top = assign_shells(space).top_block
    return tuple(make_operator(n, len(ball(space, n)), mode, seed) for n in range(top + 1))
