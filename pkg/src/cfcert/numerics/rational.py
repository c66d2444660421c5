"""Helpers around :class:`fractions.Fraction`, which serves as the rational type."""

from __future__ import annotations

import re
from fractions import Fraction

from ..errors import ParseError

Rational = Fraction

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or ``"n"``; decimals and exponents are refused."""
    m = _RATIONAL_RE.match(text)
    if not m:
        raise ParseError(f"not a rational literal: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ParseError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(x: Fraction | int) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"cannot treat {type(x).__name__} as an exact rational")


def is_integer(x: Fraction | int) -> bool:
    return Fraction(x).denominator == 1


def is_natural(x: Fraction | int) -> bool:
    """True for positive integers."""
    x = Fraction(x)
    return x.denominator == 1 and x > 0
