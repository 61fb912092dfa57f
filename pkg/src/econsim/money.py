"""Fixed-point currency representation.

All currency amounts (balances, trade deltas, wages, fees) are integers
counting multiples of 10^-12 currency units.  Integer arithmetic keeps the
global conservation ledger exact over arbitrarily long runs, and the
12-decimal grid serializes losslessly to fixed-precision decimal text.
"""

from __future__ import annotations

from fractions import Fraction

SCALE = 10**12
DECIMALS = 12


def from_decimal(text: str | int | float) -> int:
    """Parse a decimal currency amount into grid units (round half-even)."""
    if isinstance(text, int):
        return text * SCALE
    frac = Fraction(str(text))
    return quantize(frac)


def quantize(value: Fraction) -> int:
    """Round an exact rational currency amount to the grid, half-to-even."""
    return round_units(value * SCALE)


def round_units(units: Fraction) -> int:
    """Round an exact rational number of grid units to an integer, half-to-even."""
    floor = units.numerator // units.denominator
    remainder = units - floor
    if remainder > Fraction(1, 2):
        return floor + 1
    if remainder < Fraction(1, 2):
        return floor
    return floor + (floor & 1)


def to_decimal(units: int) -> str:
    """Render grid units as fixed 12-decimal text, bit-exact."""
    sign = "-" if units < 0 else ""
    units = abs(units)
    whole, frac = divmod(units, SCALE)
    return f"{sign}{whole}.{frac:0{DECIMALS}d}"


def to_float(units: int) -> float:
    return units / SCALE
