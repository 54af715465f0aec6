import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lfembed.numeric import (
    EXACT,
    FLOAT,
    floor_log2,
    format_number,
    integer_rows,
    is_power_of_two,
    parse_number,
    read_number,
)


@pytest.mark.parametrize("text, value", [("3/4", F(3, 4)), ("7", F(7)), ("0.1", F(1, 10)), (" 2 ", F(2))])
def test_parse_number(text, value):
    assert parse_number(text) == value


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        parse_number("x/2")
    with pytest.raises(ValueError):
        parse_number(math.inf)


@given(st.fractions(min_value=F(1, 10**6), max_value=10**6))
def test_floor_log2_exact(x):
    n = floor_log2(x)
    assert 2**n <= x < 2 ** (n + 1) if n >= 0 else F(1, 2**-n) <= x < F(2, 2**-n)


def test_powers_of_two():
    assert all(is_power_of_two(F(2) ** k) for k in range(-3, 10))
    assert not is_power_of_two(F(3))
    assert is_power_of_two(8.0) and not is_power_of_two(6.0)


def test_number_round_trip():
    for v in (F(3, 7), F(5), 0.25, math.inf):
        assert read_number(format_number(v), not isinstance(v, float)) == v


def test_float_slack_is_relative():
    assert FLOAT.le(1.0 + 1e-12, 1.0)
    assert not FLOAT.le(1.0 + 1e-6, 1.0)
    assert not EXACT.le(F(1) + F(1, 10**30), 1)
    assert FLOAT.eq(1e6 + 1e-4, 1e6)


@given(st.lists(st.lists(st.fractions(max_denominator=50, min_value=-100, max_value=100), min_size=3, max_size=3), min_size=1, max_size=5))
def test_integer_rows_packs_exactly(rows):
    arr, den = integer_rows(rows, True)
    assert arr.dtype == np.int64
    assert all(F(int(arr[i, j]), den) == rows[i][j] for i in range(len(rows)) for j in range(3))


def test_integer_rows_falls_back_to_python_ints():
    arr, den = integer_rows([[F(2**70), F(1, 3)]], True)
    assert arr.dtype == object and F(arr[0, 0], den) == 2**70
