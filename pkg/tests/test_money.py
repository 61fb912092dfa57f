from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from econsim.money import (DECIMALS, SCALE, from_decimal, quantize,
                           round_units, to_decimal)


def test_integer_amounts_are_exact():
    assert from_decimal(250) == 250 * SCALE
    assert to_decimal(250 * SCALE) == "250.000000000000"


def test_decimal_string_round_trip():
    units = from_decimal("304.398")
    assert units == 304398 * 10**9
    assert to_decimal(units) == "304.398000000000"


def test_negative_rendering():
    assert to_decimal(-1) == "-0.000000000001"


def test_round_half_even():
    assert round_units(Fraction(5, 2)) == 2
    assert round_units(Fraction(7, 2)) == 4
    assert round_units(Fraction(3, 4)) == 1
    assert quantize(Fraction(1, 3)) == (SCALE + 1) // 3  # 0.333... rounds down


@given(st.integers(min_value=-10**20, max_value=10**20))
def test_to_decimal_parses_back(units):
    assert from_decimal(to_decimal(units)) == units


@given(st.fractions(min_value=-10**6, max_value=10**6))
def test_quantize_error_below_half_grid(value):
    units = quantize(value)
    assert abs(Fraction(units, SCALE) - value) <= Fraction(1, 2 * SCALE)


def test_decimals_constant_matches_scale():
    assert 10**DECIMALS == SCALE
