"""Number handling shared by the exact (rational) and float arithmetic modes.

Exact mode carries :class:`fractions.Fraction` everywhere; float mode carries
Python floats.  Both types support the same operators, so most of the package
is written once against ``Number`` and the mode only shows up when values are
created, compared with slack, or handed to the array kernels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

try:
    from gmpy2 import mpq as fast_rational
except ImportError:  # pragma: no cover - gmpy2 is optional
    fast_rational = Fraction

Number = Union[Fraction, float]

#: relative slack for every inequality checked in float mode
FLOAT_SLACK = 1e-9

# int64 matrices are only used when every entry stays below this bound, so
# that a difference of two entries cannot overflow.
_INT64_SAFE = 1 << 62


def parse_number(value) -> Fraction:
    """Parse ``"p/q"``, integer or decimal text (or a number) exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not distances")
    if isinstance(value, (int, float)):
        if isinstance(value, float) and not math.isfinite(value):
            raise ValueError(f"non-finite number {value!r}")
        return Fraction(value)
    text = str(value).strip()
    if not text:
        raise ValueError("empty number")
    return Fraction(text)


def coerce(value, exact: bool) -> Number:
    if exact:
        return parse_number(value)
    if isinstance(value, str):
        return float(Fraction(value.strip()))
    return float(value)


def format_number(value):
    """JSON form of a number: ``"p/q"`` strings for rationals, floats as-is."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return float(value)


def read_number(value, exact: bool) -> Number:
    """Inverse of :func:`format_number`."""
    if isinstance(value, str) and value.strip() in ("inf", "-inf"):
        return math.inf if value.strip() == "inf" else -math.inf
    return coerce(value, exact)


def pow2(k: int, exact: bool) -> Number:
    return Fraction(2) ** k if exact else math.ldexp(1.0, k)


def floor_log2(x: Number) -> int:
    """Largest integer ``n`` with ``2**n <= x`` (``x > 0``), computed exactly."""
    if x <= 0:
        raise ValueError("floor_log2 needs a positive argument")
    if isinstance(x, Fraction):
        n = x.numerator.bit_length() - x.denominator.bit_length()
        if Fraction(2) ** n > x:
            n -= 1
        elif Fraction(2) ** (n + 1) <= x:
            n += 1
        return n
    _, e = math.frexp(x)
    return e - 1


def is_power_of_two(x: Number) -> bool:
    return x > 0 and pow2(floor_log2(x), isinstance(x, Fraction)) == x


@dataclass(frozen=True)
class Arith:
    """Comparison policy for one arithmetic mode.

    Exact mode compares with zero slack.  Float mode accepts ``a <= b`` when
    the excess is within ``FLOAT_SLACK`` times the magnitude of the operands
    (or of ``scale`` when the operands are small by cancellation).
    """

    exact: bool

    def coerce(self, value) -> Number:
        return coerce(value, self.exact)

    def _tol(self, a, b, scale) -> float:
        return FLOAT_SLACK * max(abs(a), abs(b), abs(scale))

    def le(self, a: Number, b: Number, scale: Number = 0) -> bool:
        if self.exact:
            return a <= b
        return a <= b + self._tol(a, b, scale)

    def ge(self, a: Number, b: Number, scale: Number = 0) -> bool:
        return self.le(b, a, scale)

    def eq(self, a: Number, b: Number, scale: Number = 0) -> bool:
        if self.exact:
            return a == b
        return abs(a - b) <= self._tol(a, b, scale)


EXACT = Arith(True)
FLOAT = Arith(False)


def arith_for(exact: bool) -> Arith:
    return EXACT if exact else FLOAT


def integer_rows(rows: Sequence[Sequence[Number]], exact: bool) -> tuple[np.ndarray, int]:
    """Pack a rectangular table into an array plus a common denominator.

    In exact mode the returned integer array ``a`` and denominator ``q``
    satisfy ``rows[i][j] == Fraction(a[i, j], q)``; the dtype is int64 when
    that is overflow-safe for differences and ``object`` (Python ints)
    otherwise.  Float mode returns a float64 array and ``q == 1``.
    """
    if not exact:
        return np.asarray(rows, dtype=np.float64).reshape(len(rows), -1), 1
    q = 1
    for row in rows:
        for v in row:
            q = math.lcm(q, v.denominator)
    ints = [[v.numerator * (q // v.denominator) for v in row] for row in rows]
    big = max((abs(x) for row in ints for x in row), default=0)
    dtype = np.int64 if big < _INT64_SAFE else object
    arr = np.empty((len(ints), len(ints[0]) if ints else 0), dtype=dtype)
    for i, row in enumerate(ints):
        arr[i, :] = row
    return arr, q


def lcm_all(values: Iterable[int]) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, v)
    return out


def as_fraction_or_float(num, den: int, exact: bool) -> Number:
    """Value of one packed entry (see :func:`integer_rows`)."""
    if exact:
        return Fraction(int(num), den)
    return float(num)
