"""Exact rational helpers.

``fractions.Fraction`` is the rational type throughout the package; this
module only adds strict parsing, integer floor/ceiling and the fixed decimal
rendering used in reports.
"""

from __future__ import annotations

import decimal
from fractions import Fraction
from numbers import Rational as _RationalABC

from .errors import InputError

Rational = Fraction

DECIMAL_DIGITS = 15


def as_rational(value) -> Fraction:
    """Convert ``value`` to a Fraction without ever going through a float.

    Accepts ints, Fractions (or any ``numbers.Rational``) and strings such as
    ``"3/4"``, ``"-2"`` or ``"0.125"``. Floats are rejected because they carry
    binary rounding error.
    """
    if isinstance(value, bool):
        raise InputError(f"not a rational number: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, _RationalABC)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"cannot parse rational {value!r}: {exc}") from None
    raise InputError(f"expected an exact rational (int, Fraction or string), got {type(value).__name__}: {value!r}")


def floor_q(x: Fraction) -> int:
    return x.numerator // x.denominator


def ceil_q(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def format_rational(x: Fraction) -> str:
    """``"p/q"``, or a bare integer string when the denominator is 1."""
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def to_decimal_string(x: Fraction, digits: int = DECIMAL_DIGITS) -> str:
    """Render ``x`` to ``digits`` significant digits, round-half-even."""
    ctx = decimal.Context(prec=digits, rounding=decimal.ROUND_HALF_EVEN)
    value = ctx.divide(decimal.Decimal(x.numerator), decimal.Decimal(x.denominator))
    return format(value, "f") if abs(value.adjusted()) < digits else str(value)
