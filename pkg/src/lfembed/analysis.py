"""Measurement and certification of an :class:`~lfembed.glue.Embedding`.

All pair quantities come from sup-norm tables built once per embedding by
the pairwise kernel: for every block ``k`` the distances between the
block-``k`` parts of the images (``|Pi_k(f(t) - f(t'))|``) and between the
unweighted Frechet blocks ``f_k(t) = T_k(phi_k(t))``.  In exact mode the
tables hold integer numerators over a per-block denominator, so every
reported value and every checked inequality is exact.
"""

from __future__ import annotations

import bisect
import math
import weakref
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .blocks import BlockVector
from .glue import Embedding
from .numeric import Arith, Number, arith_for, fast_rational, integer_rows

#: constants the construction guarantees
LIP_BOUND = 9
COLIP_BOUND = 24
DIST_BOUND = 216
ENVELOPE_LOW = Fraction(1, 16)


# --------------------------------------------------------------------------
# pair tables
# --------------------------------------------------------------------------


@dataclass
class _BlockTable:
    rows: dict  # point index -> row position
    pair: np.ndarray
    norm: np.ndarray
    den: int
    exact: bool

    def _val(self, x):
        return fast_rational(int(x), self.den) if self.exact else float(x)

    def diff(self, i: int, j: int):
        a, b = self.rows.get(i), self.rows.get(j)
        if a is None and b is None:
            return self._val(0)
        if a is None:
            return self._val(self.norm[b])
        if b is None:
            return self._val(self.norm[a])
        return self._val(self.pair[a, b])

    def single(self, i: int):
        a = self.rows.get(i)
        if a is None:
            return self._val(0)
        return self._val(self.norm[a])


def _table(vectors: dict, exact: bool) -> _BlockTable:
    order = list(vectors)
    if not order:
        return _BlockTable({}, np.zeros((0, 0)), np.zeros(0), 1, exact)
    arr, den = integer_rows([vectors[t] for t in order], exact)
    pair = kernels.pairwise_cheb(arr)
    norm = np.abs(arr).max(axis=1) if arr.shape[1] else np.zeros(len(order), dtype=arr.dtype)
    return _BlockTable({t: i for i, t in enumerate(order)}, pair, norm, den, exact)


class PairData:
    """Sup-norm tables for one embedding plus per-point image checks.

    In exact mode the pair loop runs on ``gmpy2.mpq`` when available (an
    order of magnitude faster than ``Fraction``); ``dist``, ``norms``,
    ``weight`` and ``conorm`` hold the converted copies it uses.
    """

    def __init__(self, emb: Embedding):
        self.emb = emb
        space = emb.space
        self.exact = space.exact
        self.arith: Arith = arith_for(space.exact)
        self.n = space.size
        num = fast_rational if self.exact else float
        self.num = num
        self.dist = tuple(tuple(num(v) for v in row) for row in space.dist)
        self.norms = self.dist[space.basepoint]
        self.weight = {t: num(w) for t, w in emb.shells.weight.items()}
        self.conorm = [num(op.conorm_bound) for op in emb.operators]
        self.zero, self.one, self.half = num(0), num(1), num(1) / 2
        self.top = len(emb.operators) - 1
        self.image: dict[int, _BlockTable] = {}
        self.raw: dict[int, _BlockTable] = {}
        self.point_failures: list = []
        for k in range(self.top + 1):
            pts = emb.balls[k]
            img_rows = {}
            for t, vec in emb.image.items():
                blk = vec.blocks.get(k)
                if blk is None:
                    continue
                if blk.ball_points != pts:
                    raise ValueError(f"image of point {t} uses a wrong index set in block {k}")
                img_rows[t] = blk.values
            self.image[k] = _table(img_rows, self.exact)
            raw_rows = {}
            for t, w in emb.shells.members(k):
                raw = emb.frechet_block(k, t)
                raw_rows[t] = raw.values
                expect = tuple(w * x for x in raw.values) if w != 1 else raw.values
                got = img_rows.get(t)
                if got is None:
                    got = (0,) * len(expect)
                if not all(self.arith.eq(a, b, space.norms[t]) for a, b in zip(got, expect)):
                    self.point_failures.append((t, k))
            self.raw[k] = _table(raw_rows, self.exact)
            for t in img_rows:
                if t not in raw_rows:
                    self.point_failures.append((t, k))

    def pow2(self, k: int):
        return self.num(2**k) if self.exact else math.ldexp(1.0, k)

    def proj(self, k: int, i: int, j: int):
        """``|Pi_k(f(i) - f(j))|``."""
        tab = self.image.get(k)
        if tab is None:
            return self.zero
        return tab.diff(i, j)

    def gap(self, i: int, j: int):
        """``|f(i) - f(j)|``: the largest block difference."""
        blocks = set(self.emb.image[i].blocks) | set(self.emb.image[j].blocks)
        return max((self.proj(k, i, j) for k in blocks), default=self.zero)

    def raw_diff(self, k: int, i: int, j: int) -> Number:
        return self.raw[k].diff(i, j)

    def raw_norm(self, k: int, i: int) -> Number:
        return self.raw[k].single(i)

    def image_norm(self, i: int):
        return max((self.image[k].single(i) for k in self.emb.image[i].blocks), default=self.zero)

    def public(self, x) -> Number:
        """Convert an internal value to the package's number type."""
        if isinstance(x, float):
            return x
        return Fraction(int(x.numerator), int(x.denominator)) if self.exact else float(x)

    def pairs(self) -> Iterable[tuple[int, int]]:
        for i in range(self.n):
            for j in range(i + 1, self.n):
                yield i, j


_CACHE: "weakref.WeakKeyDictionary[Embedding, PairData]" = weakref.WeakKeyDictionary()


def pair_data(emb: Embedding) -> PairData:
    data = _CACHE.get(emb)
    if data is None:
        data = _CACHE[emb] = PairData(emb)
    return data


# --------------------------------------------------------------------------
# distortion
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DistortionReport:
    lip: Number
    colip: Number
    dist: Number
    lip_witness: tuple
    colip_witness: tuple
    pair_count: int
    injective: bool = True

    @property
    def bounds(self) -> dict:
        return {
            "lip_le_9": self.lip <= LIP_BOUND,
            "colip_le_24": self.colip <= COLIP_BOUND,
            "dist_le_216": self.dist <= DIST_BOUND,
        }

    def within_bounds(self, arith: Arith) -> bool:
        return (
            self.injective
            and arith.le(self.lip, LIP_BOUND)
            and arith.le(self.colip, COLIP_BOUND)
            and arith.le(self.dist, DIST_BOUND)
        )


def _scan(n: int, dist, gap, public) -> DistortionReport:
    if n < 2:
        raise ValueError("distortion needs at least two points")
    lip = colip = None
    lip_w = colip_w = None
    injective = True
    for i in range(n):
        for j in range(i + 1, n):
            g = gap(i, j)
            d = dist[i][j]
            up = g / d
            if lip is None or up > lip:
                lip, lip_w = up, (i, j)
            if g == 0:
                if injective:
                    injective = False
                    colip, colip_w = math.inf, (i, j)
                continue
            if injective:
                down = d / g
                if colip is None or down > colip:
                    colip, colip_w = down, (i, j)
    lip = public(lip)
    if injective:
        colip = public(colip)
    return DistortionReport(
        lip, colip, lip * colip if injective else math.inf, lip_w, colip_w,
        n * (n - 1) // 2, injective,
    )


def distortion(emb: Embedding) -> DistortionReport:
    """Exact Lipschitz constants of ``f`` and ``f^-1`` over all pairs."""
    data = pair_data(emb)
    return _scan(data.n, data.dist, data.gap, data.public)


def _flatten(vec) -> dict:
    if isinstance(vec, BlockVector):
        return {(k, s): x for k, b in vec.blocks.items() for s, x in zip(b.ball_points, b.values)}
    return dict(zip(vec.ball_points, vec.values))


def map_distortion(space, images: Mapping) -> DistortionReport:
    """Distortion of an arbitrary map into a sup-norm space.

    ``images[t]`` is a :class:`CoordVector` or :class:`BlockVector`; missing
    coordinates count as zero.  Used for baselines such as the Kuratowski map.
    """
    flat = [_flatten(images[t]) for t in range(space.size)]
    layout = sorted({k for f in flat for k in f}, key=repr)
    zero = Fraction(0) if space.exact else 0.0
    arr, den = integer_rows([[f.get(k, zero) for k in layout] for f in flat] if layout
                            else [[zero] for _ in flat], space.exact)
    cheb = kernels.pairwise_cheb(arr)
    num = fast_rational if space.exact else float
    dist = [[num(v) for v in row] for row in space.dist]
    if space.exact:
        gap = lambda i, j: fast_rational(int(cheb[i, j]), den)  # noqa: E731
        public = lambda x: Fraction(int(x.numerator), int(x.denominator))  # noqa: E731
    else:
        gap = lambda i, j: float(cheb[i, j])  # noqa: E731
        public = float
    return _scan(space.size, dist, gap, public)


# --------------------------------------------------------------------------
# case certification
# --------------------------------------------------------------------------

LIP_CASES = ("I", "II.1", "II.2")
#: inverse cases; "0" covers pairs containing the basepoint
INV_CASES = ("0", "1", "2", "3")


@dataclass(frozen=True)
class Check:
    name: str
    lhs: Number
    relation: str
    rhs: Number
    ok: bool


@dataclass(frozen=True)
class PairCertificate:
    t: int  # the point with the smaller norm
    s: int
    lip_case: str
    inv_case: str
    d: Number
    gap: Number
    checks: tuple

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def case_ok(self, which: str) -> bool:
        prefix = "lip" if which == "lip" else "inv"
        return all(c.ok for c in self.checks if c.name.startswith(prefix))


@dataclass
class CaseLedger:
    pairs: list = field(default_factory=list)
    point_failures: list = field(default_factory=list)
    lip_counts: dict = field(default_factory=lambda: dict.fromkeys(LIP_CASES, 0))
    inv_counts: dict = field(default_factory=lambda: dict.fromkeys(INV_CASES, 0))
    checks_run: int = 0
    failures: list = field(default_factory=list)  # failing PairCertificates

    @property
    def ok(self) -> bool:
        return not self.failures and not self.point_failures

    @property
    def pair_count(self) -> int:
        return sum(self.lip_counts.values())


class _Checks:
    __slots__ = ("arith", "scale", "out")

    def __init__(self, arith: Arith, scale: Number):
        self.arith = arith
        self.scale = scale
        self.out: list = []

    def le(self, name, lhs, rhs):
        self.out.append(Check(name, lhs, "<=", rhs, self.arith.le(lhs, rhs, self.scale)))

    def ge(self, name, lhs, rhs):
        self.out.append(Check(name, lhs, ">=", rhs, self.arith.ge(lhs, rhs, self.scale)))

    def eq(self, name, lhs, rhs):
        self.out.append(Check(name, lhs, "==", rhs, self.arith.eq(lhs, rhs, self.scale)))


def lipschitz_case(r: Number, big: Number, n: int | None, p: int | None) -> str:
    """Case of the Lipschitz estimate for ``|t| = r <= |t'| = big``."""
    if 2 * r <= big:
        return "I"
    if n == p:
        return "II.1"
    if p == n + 1:
        return "II.2"
    raise AssertionError("pairs with |t| > |t'|/2 lie in equal or adjacent shells")


def inverse_case(t_is_base: bool, n: int | None, p: int | None) -> str:
    if t_is_base:
        return "0"
    if n == p:
        return "1"
    if p == n + 1:
        return "2"
    return "3"


def _lipschitz_checks(c: _Checks, data: PairData, t, s, r, big, d, gap, case, half, one):
    shells, weights = data.emb.shells.shell, data.weight
    if case == "I":
        c.le("lip I: |f(t)-f(t')| <= |t|+|t'|", gap, r + big)
        c.le("lip I: |t|+|t'| <= 3/2 |t'|", r + big, 3 * half * big)
        c.le("lip I: 3/2 |t'| <= 3(|t'|-|t|)", 3 * half * big, 3 * (big - r))
        c.le("lip I: 3(|t'|-|t|) <= 3d", 3 * (big - r), 3 * d)
        c.le("lip I: |f(t)-f(t')| <= 3d", gap, 3 * d)
        return
    n = shells[t]
    lam, lam2 = weights[t], weights[s]
    if case == "II.1":
        two_n = data.pow2(n)
        dl = abs(lam - lam2)
        c.eq("lip II.1: |lam-lam'| = (|t'|-|t|)/2^n", dl, (big - r) / two_n)
        c.le("lip II.1: (|t'|-|t|)/2^n <= d/2^n", (big - r) / two_n, d / two_n)
        a = data.raw_diff(n, t, s)
        b = data.raw_diff(n + 1, t, s)
        c.le("lip II.1: |f_n(t)-f_n(t')| <= d", a, d)
        c.le("lip II.1: |f_n+1(t)-f_n+1(t')| <= d", b, d)
        split = lam * a + (one - lam) * b + 2 * dl * big
        c.le("lip II.1: |f(t)-f(t')| <= lam|df_n| + (1-lam)|df_n+1| + 2|lam-lam'||t'|", gap, split)
        mid = d + 4 * two_n * dl
        c.le("lip II.1: ... <= d + 2^(n+2)|lam-lam'|", split, mid)
        c.le("lip II.1: d + 2^(n+2)|lam-lam'| <= 5d", mid, 5 * d)
        c.le("lip II.1: |f(t)-f(t')| <= 5d", gap, 5 * d)
        return
    two_n = data.pow2(n)
    c.le("lip II.2: lam <= d/2^n", lam, d / two_n)
    c.le("lip II.2: lam|t| <= 2d", lam * r, 2 * d)
    c.eq("lip II.2: 1-lam' = (|t'|-2^(n+1))/2^(n+1)", one - lam2, (big - 2 * two_n) / (2 * two_n))
    c.le("lip II.2: 1-lam' <= d/2^(n+1)", one - lam2, d / (2 * two_n))
    c.le("lip II.2: (1-lam')|t'| <= 2d", (one - lam2) * big, 2 * d)
    fn_t = data.raw_norm(n, t)
    fn1_t = data.raw_norm(n + 1, t)
    fn1_s = data.raw_norm(n + 1, s)
    fn2_s = data.raw_norm(n + 2, s)
    for name, val, bound in (
        ("|f_n(t)| <= |t|", fn_t, r),
        ("|f_n+1(t)| <= |t|", fn1_t, r),
        ("|f_n+1(t')| <= |t'|", fn1_s, big),
        ("|f_n+2(t')| <= |t'|", fn2_s, big),
    ):
        c.le("lip II.2: " + name, val, bound)
    mixed = data.raw_diff(n + 1, t, s)
    c.le("lip II.2: |f_n+1(t)-f_n+1(t')| <= d", mixed, d)
    split = lam * (fn_t + fn1_t) + (one - lam2) * (fn1_s + fn2_s) + mixed
    c.le("lip II.2: |f(t)-f(t')| <= lam(..) + (1-lam')(..) + |df_n+1|", gap, split)
    mid = d + 2 * lam * r + 2 * (one - lam2) * big
    c.le("lip II.2: ... <= d + 2lam|t| + 2(1-lam')|t'|", split, mid)
    c.le("lip II.2: d + 2lam|t| + 2(1-lam')|t'| <= 9d", mid, 9 * d)
    c.le("lip II.2: |f(t)-f(t')| <= 9d", gap, 9 * d)


def _inverse_checks(c: _Checks, data: PairData, t, s, r, big, d, gap, case, half, one):
    emb = data.emb
    dist = data.dist
    conorm = data.conorm
    if case == "0":
        c.eq("inv 0: |t'| = d(t0,t')", big, d)
        c.ge("inv 0: 16|f(t')| >= |t'|", 16 * gap, big)
        c.ge("inv 0: 16|f(t)-f(t')| >= d", 16 * gap, d)
        return
    shells, weights = emb.shells.shell, data.weight
    n, p = shells[t], shells[s]
    lam, lam2 = weights[t], weights[s]
    if case == "1":
        # coordinate s = t' of lam*phi_n(t) - lam'*phi_n(t'), read off the table
        coord_n = lam * (dist[s][t] - big) - lam2 * (dist[s][s] - big)
        low_n = lam * d + (lam2 - lam) * big
        c.eq("inv 1: [lam phi_n(t) - lam' phi_n(t')](t') = lam d + (lam'-lam)|t'|", coord_n, low_n)
        pn = data.proj(n, t, s)
        c.ge("inv 1: |Pi_n df| >= conorm_n |coord|", pn, conorm[n] * abs(coord_n))
        c.ge("inv 1: 2|Pi_n df| >= lam d + (lam'-lam)|t'|", 2 * pn, low_n)
        coord_n1 = (one - lam) * (dist[s][t] - big) - (one - lam2) * (dist[s][s] - big)
        low_n1 = (one - lam) * d + (lam - lam2) * big
        c.eq("inv 1: [(1-lam)phi_n+1(t) - (1-lam')phi_n+1(t')](t') = (1-lam)d + (lam-lam')|t'|",
             coord_n1, low_n1)
        pn1 = data.proj(n + 1, t, s)
        c.ge("inv 1: |Pi_n+1 df| >= conorm_n+1 |coord|", pn1, conorm[n + 1] * abs(coord_n1))
        c.ge("inv 1: 2|Pi_n+1 df| >= (1-lam)d + (lam-lam')|t'|", 2 * pn1, low_n1)
        c.le("inv 1: |Pi_n df| <= 4|df|", pn, 4 * gap)
        c.le("inv 1: |Pi_n+1 df| <= 4|df|", pn1, 4 * gap)
        c.eq("inv 1: the two lower bounds sum to d", low_n + low_n1, d)
        c.ge("inv 1: 16|df| >= 2|Pi_n df| + 2|Pi_n+1 df|", 16 * gap, 2 * pn + 2 * pn1)
        c.ge("inv 1: 16|f(t)-f(t')| >= d", 16 * gap, d)
        return
    if case == "2":
        pn = data.proj(n, t, s)
        fn_t = data.raw_norm(n, t)
        c.eq("inv 2: |Pi_n df| = lam |f_n(t)|", pn, lam * fn_t)
        c.ge("inv 2: |f_n(t)| >= conorm_n |t|", fn_t, conorm[n] * r)
        c.ge("inv 2: 2|Pi_n df| >= lam|t|", 2 * pn, lam * r)
        pn2 = data.proj(n + 2, t, s)
        fn2_s = data.raw_norm(n + 2, s)
        c.eq("inv 2: |Pi_n+2 df| = (1-lam')|f_n+2(t')|", pn2, (one - lam2) * fn2_s)
        c.ge("inv 2: |f_n+2(t')| >= conorm_n+2 |t'|", fn2_s, conorm[n + 2] * big)
        c.ge("inv 2: 2|Pi_n+2 df| >= (1-lam')|t'|", 2 * pn2, (one - lam2) * big)
        # coordinate s = t of lam'*phi_n+1(t') - (1-lam)*phi_n+1(t)
        coord = lam2 * (dist[t][s] - r) - (one - lam) * (dist[t][t] - r)
        low = lam2 * d - lam2 * r + (one - lam) * r
        c.eq("inv 2: [lam' phi_n+1(t') - (1-lam)phi_n+1(t)](t) = lam'd - lam'|t| + (1-lam)|t|", coord, low)
        pn1 = data.proj(n + 1, t, s)
        c.ge("inv 2: |Pi_n+1 df| >= conorm_n+1 |coord|", pn1, conorm[n + 1] * abs(coord))
        c.ge("inv 2: 2|Pi_n+1 df| >= lam'd - lam'|t| + (1-lam)|t|", 2 * pn1, low)
        for k, pk in ((n, pn), (n + 1, pn1), (n + 2, pn2)):
            c.le(f"inv 2: |Pi_{k} df| <= 4|df|", pk, 4 * gap)
        total = lam * r + low + (one - lam2) * big
        combined = lam2 * d + (one - lam2) * (r + big)
        c.eq("inv 2: sum of lower bounds = lam'd + (1-lam')(|t|+|t'|)", total, combined)
        c.ge("inv 2: 24|df| >= 2(|Pi_n df| + |Pi_n+1 df| + |Pi_n+2 df|)", 24 * gap, 2 * (pn + pn1 + pn2))
        c.ge("inv 2: 24|f(t)-f(t')| >= lam'd + (1-lam')(|t|+|t'|)", 24 * gap, combined)
        c.ge("inv 2: lam'd + (1-lam')(|t|+|t'|) >= d", combined, d)
        c.ge("inv 2: 24|f(t)-f(t')| >= d", 24 * gap, d)
        return
    pp = data.proj(p, t, s)
    fp = data.raw_norm(p, s)
    c.eq("inv 3: |Pi_p df| = lam'|f_p(t')|", pp, lam2 * fp)
    c.ge("inv 3: |f_p(t')| >= conorm_p |t'|", fp, conorm[p] * big)
    c.ge("inv 3: 2|Pi_p df| >= lam'|t'|", 2 * pp, lam2 * big)
    pp1 = data.proj(p + 1, t, s)
    fp1 = data.raw_norm(p + 1, s)
    c.eq("inv 3: |Pi_p+1 df| = (1-lam')|f_p+1(t')|", pp1, (one - lam2) * fp1)
    c.ge("inv 3: |f_p+1(t')| >= conorm_p+1 |t'|", fp1, conorm[p + 1] * big)
    c.ge("inv 3: 2|Pi_p+1 df| >= (1-lam')|t'|", 2 * pp1, (one - lam2) * big)
    c.le("inv 3: |Pi_p df| <= 4|df|", pp, 4 * gap)
    c.le("inv 3: |Pi_p+1 df| <= 4|df|", pp1, 4 * gap)
    c.ge("inv 3: 2|Pi_p df| + 2|Pi_p+1 df| >= |t'|", 2 * pp + 2 * pp1, big)
    c.ge("inv 3: 24|f(t)-f(t')| >= 3/2 |t'|", 24 * gap, 3 * half * big)
    c.ge("inv 3: 3/2 |t'| >= |t'|+|t|", 3 * half * big, big + r)
    c.ge("inv 3: |t'|+|t| >= d", big + r, d)
    c.ge("inv 3: 24|f(t)-f(t')| >= d", 24 * gap, d)


def certify_pair(data: PairData, i: int, j: int) -> PairCertificate:
    """All checks for one pair.  Exact values may be ``gmpy2.mpq`` rationals."""
    emb = data.emb
    norms = data.norms
    if (norms[j], j) < (norms[i], i):
        i, j = j, i
    t, s = i, j
    r, big = norms[t], norms[s]
    d = data.dist[t][s]
    gap = data.gap(t, s)
    shells = emb.shells.shell
    base = t == emb.space.basepoint
    n, p = shells.get(t), shells.get(s)
    half, one = data.half, data.one
    c = _Checks(data.arith, big)
    try:
        lip_case = lipschitz_case(r, big, n, p)
    except AssertionError:
        lip_case = "?"
        c.out.append(Check("lip: case partition", n, "~", p, False))
    inv_case = inverse_case(base, n, p)
    if lip_case != "?":
        _lipschitz_checks(c, data, t, s, r, big, d, gap, lip_case, half, one)
    _inverse_checks(c, data, t, s, r, big, d, gap, inv_case, half, one)
    return PairCertificate(t, s, lip_case, inv_case, d, gap, tuple(c.out))


def certify_cases(emb: Embedding, keep: bool = True) -> CaseLedger:
    """Evaluate every displayed inequality of the applicable cases, per pair.

    With ``keep=False`` only failing pairs are retained (counts are always
    complete).
    """
    data = pair_data(emb)
    ledger = CaseLedger(point_failures=list(data.point_failures))
    for i, j in data.pairs():
        cert = certify_pair(data, i, j)
        ledger.lip_counts[cert.lip_case] = ledger.lip_counts.get(cert.lip_case, 0) + 1
        ledger.inv_counts[cert.inv_case] += 1
        ledger.checks_run += len(cert.checks)
        if keep:
            ledger.pairs.append(cert)
        if not cert.ok:
            ledger.failures.append(cert)
    return ledger


# --------------------------------------------------------------------------
# envelope and moduli
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class EnvelopeVerdict:
    ok: bool
    min_ratio: Number
    max_ratio: Number
    min_point: int | None
    max_point: int | None
    violations: tuple


def envelope_check(emb: Embedding) -> EnvelopeVerdict:
    """``|t|/16 <= |f(t)| <= |t|`` at every non-basepoint."""
    data = pair_data(emb)
    arith = data.arith
    norms = data.norms
    lo = hi = None
    lo_t = hi_t = None
    bad = []
    for t in range(data.n):
        if t == emb.space.basepoint:
            continue
        ratio = data.image_norm(t) / norms[t]
        if lo is None or ratio < lo:
            lo, lo_t = ratio, t
        if hi is None or ratio > hi:
            hi, hi_t = ratio, t
        if not (arith.ge(ratio, ENVELOPE_LOW) and arith.le(ratio, 1)):
            bad.append(t)
    return EnvelopeVerdict(not bad, data.public(lo), data.public(hi), lo_t, hi_t, tuple(bad))


@dataclass(frozen=True)
class ModuliProfile:
    """Compression ``rho(t) = inf{|df| : d >= t}`` and expansion
    ``omega(t) = sup{|df| : d <= t}``; ``rho`` is ``inf`` and ``omega`` is 0
    over empty pair sets."""

    thresholds: tuple
    rho: tuple
    omega: tuple
    ok: bool
    violations: tuple


def default_thresholds(emb: Embedding, count: int = 20) -> tuple:
    """``count`` evenly spaced thresholds from half the smallest to twice the
    largest pair distance (both ends probe the empty-set conventions)."""
    dist = emb.space.dist
    n = emb.space.size
    vals = [dist[i][j] for i in range(n) for j in range(i + 1, n)]
    lo, hi = min(vals) / 2, max(vals) * 2
    return tuple(lo + (hi - lo) * k / (count - 1) for k in range(count))


def moduli(emb: Embedding, thresholds: Sequence[Number] | None = None) -> ModuliProfile:
    data = pair_data(emb)
    arith = data.arith
    if thresholds is None:
        thresholds = default_thresholds(emb)
    thresholds = tuple(thresholds)
    if any(x <= 0 for x in thresholds) or any(b <= a for a, b in zip(thresholds, thresholds[1:])):
        raise ValueError("thresholds must be positive and strictly increasing")
    dist = data.dist
    rows = sorted((dist[i][j], data.gap(i, j)) for i, j in data.pairs())
    ds = [r[0] for r in rows]
    prefix_max, run = [], None
    for _, g in rows:
        run = g if run is None or g > run else run
        prefix_max.append(run)
    suffix_min, run = [None] * len(rows), None
    for idx in range(len(rows) - 1, -1, -1):
        g = rows[idx][1]
        run = g if run is None or g < run else run
        suffix_min[idx] = run
    zero = data.zero
    rho, omega, bad = [], [], []
    for x in thresholds:
        hi = bisect.bisect_right(ds, x)  # pairs with d <= x
        lo = bisect.bisect_left(ds, x)  # first pair with d >= x
        w = prefix_max[hi - 1] if hi else zero
        rr = suffix_min[lo] if lo < len(rows) else math.inf
        omega.append(data.public(w))
        rho.append(rr if rr == math.inf else data.public(rr))
        if hi and not arith.le(w, LIP_BOUND * x):
            bad.append(("omega <= 9t", x, w))
        if lo < len(rows) and not arith.ge(rr, x / COLIP_BOUND):
            bad.append(("rho >= t/24", x, rr))
    for a, b in zip(omega, omega[1:]):
        if b < a:
            bad.append(("omega nondecreasing", a, b))
    for a, b in zip(rho, rho[1:]):
        if b < a:
            bad.append(("rho nondecreasing", a, b))
    return ModuliProfile(thresholds, tuple(rho), tuple(omega), not bad, tuple(bad))


# --------------------------------------------------------------------------
# Frechet isometry per block
# --------------------------------------------------------------------------


def frechet_isometry_defect(space, n: int) -> Number:
    """max over ``s, t`` in ``B_n`` of ``| |phi_n(s) - phi_n(t)| - d(s,t) |``."""
    from .metric import ball

    pts = ball(space, n)
    norms = space.norms
    rows = [[space.dist[t][s] - norms[s] for s in pts] for t in pts]
    arr, den = integer_rows(rows, space.exact)
    cheb = kernels.pairwise_cheb(arr)
    sub, den2 = integer_rows([[space.dist[a][b] for b in pts] for a in pts], space.exact)
    if space.exact:
        common = den * den2 // math.gcd(den, den2)
        if common != den or common != den2:
            cheb = cheb.astype(object) * (common // den)
            sub = sub.astype(object) * (common // den2)
        worst = np.abs(cheb - sub).max(initial=0)
        return Fraction(int(worst), common)
    return float(np.abs(cheb - sub).max(initial=0.0))
