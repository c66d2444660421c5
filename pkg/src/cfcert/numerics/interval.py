"""Interval reals with dyadic endpoints and outward rounding.

Endpoints live on the grid 2**-prec; every operation rounds the lower end
down and the upper end up, so the true value always stays inside.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable

from ..errors import PrecisionCapExceeded
from .quad import QuadElem

GUARD_DIGITS = 10
ESCALATION_CAP = 16
_LOG2_10 = math.log2(10)

Producer = Callable[[int], "IntervalReal"]


def bits_for_digits(digits: int) -> int:
    """Grid resolution (bits after the binary point) giving spacing well below 10**-digits."""
    return math.ceil(max(digits, 0) * _LOG2_10) + 4


def tolerance(digits: int) -> Fraction:
    return Fraction(1, 10**digits) if digits >= 0 else Fraction(10 ** (-digits))


def _floor_grid(x: Fraction, prec: int) -> Fraction:
    if x.denominator == 1 or (x.denominator & (x.denominator - 1) == 0 and x.denominator.bit_length() - 1 <= prec):
        return x
    return Fraction(math.floor(x * (1 << prec)), 1 << prec)


def _ceil_grid(x: Fraction, prec: int) -> Fraction:
    if x.denominator == 1 or (x.denominator & (x.denominator - 1) == 0 and x.denominator.bit_length() - 1 <= prec):
        return x
    return Fraction(math.ceil(x * (1 << prec)), 1 << prec)


def _as_exact(v):
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    return None


class IntervalReal:
    """Closed interval [lo, hi] known to contain a real number.

    ``exact`` records the value when it is a known rational; ``producer`` is an
    optional closure ``digits -> IntervalReal`` that recomputes the same number
    more tightly, used by :func:`interval_refine`.
    """

    __slots__ = ("lo", "hi", "prec", "exact", "producer")

    def __init__(self, lo, hi, prec: int, exact: Fraction | None = None, producer: Producer | None = None):
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", _floor_grid(lo, prec))
        object.__setattr__(self, "hi", _ceil_grid(hi, prec))
        object.__setattr__(self, "prec", prec)
        object.__setattr__(self, "exact", exact)
        object.__setattr__(self, "producer", producer)

    def __setattr__(self, name, value):
        raise AttributeError("IntervalReal is immutable")

    # construction ---------------------------------------------------------

    @classmethod
    def from_fraction(cls, x, digits: int = 30) -> "IntervalReal":
        x = Fraction(x)
        return cls(x, x, bits_for_digits(digits), exact=x, producer=lambda d: cls.from_fraction(x, d))

    @classmethod
    def from_bounds(cls, lo, hi, digits: int = 30, producer: Producer | None = None) -> "IntervalReal":
        return cls(lo, hi, bits_for_digits(digits), producer=producer)

    def with_producer(self, producer: Producer | None) -> "IntervalReal":
        return IntervalReal(self.lo, self.hi, self.prec, self.exact, producer)

    # queries ----------------------------------------------------------------

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        if isinstance(x, IntervalReal):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, QuadElem):
            return (x - self.lo).sign() >= 0 and (self.hi - x).sign() >= 0
        return self.lo <= Fraction(x) <= self.hi

    def overlaps(self, other: "IntervalReal") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def intersect(self, other: "IntervalReal") -> "IntervalReal":
        if not self.overlaps(other):
            raise ValueError("disjoint enclosures")
        exact = self.exact if self.exact is not None else other.exact
        return IntervalReal(max(self.lo, other.lo), min(self.hi, other.hi), max(self.prec, other.prec),
                            exact, self.producer or other.producer)

    def hull(self, other: "IntervalReal") -> "IntervalReal":
        return IntervalReal(min(self.lo, other.lo), max(self.hi, other.hi), max(self.prec, other.prec))

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def abs_upper(self) -> Fraction:
        return max(abs(self.lo), abs(self.hi))

    def abs_lower(self) -> Fraction:
        if self.contains_zero():
            return Fraction(0)
        return min(abs(self.lo), abs(self.hi))

    def is_tight(self, digits: int) -> bool:
        return self.width < tolerance(digits)

    # arithmetic -------------------------------------------------------------

    def _coerce(self, other) -> "IntervalReal | None":
        if isinstance(other, IntervalReal):
            return other
        x = _as_exact(other)
        if x is not None:
            return IntervalReal(x, x, self.prec, exact=x)
        if isinstance(other, QuadElem):
            return quad_to_interval(other, max(0, math.floor(self.prec / _LOG2_10)))
        return None

    def _result(self, other: "IntervalReal", lo, hi, exact_op) -> "IntervalReal":
        exact = None
        if self.exact is not None and other.exact is not None:
            exact = exact_op(self.exact, other.exact)
        return IntervalReal(lo, hi, max(self.prec, other.prec), exact)

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._result(o, self.lo + o.lo, self.hi + o.hi, lambda a, b: a + b)

    __radd__ = __add__

    def __neg__(self):
        ex = -self.exact if self.exact is not None else None
        return IntervalReal(-self.hi, -self.lo, self.prec, ex)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._result(o, self.lo - o.hi, self.hi - o.lo, lambda a, b: a - b)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        ps = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return self._result(o, min(ps), max(ps), lambda a, b: a * b)

    __rmul__ = __mul__

    def reciprocal(self) -> "IntervalReal":
        if self.contains_zero():
            raise ZeroDivisionError("interval divisor contains zero")
        ex = 1 / self.exact if self.exact is not None else None
        return IntervalReal(1 / self.hi, 1 / self.lo, self.prec, ex)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.contains_zero():
            raise ZeroDivisionError("interval divisor contains zero")
        r = o.reciprocal()
        ps = (self.lo * r.lo, self.lo * r.hi, self.hi * r.lo, self.hi * r.hi)
        return self._result(o, min(ps), max(ps), lambda a, b: a / b)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    # output -----------------------------------------------------------------

    def decimal_bounds(self, digits: int) -> tuple[str, str]:
        """Endpoints printed with ``digits`` decimals, lo rounded down and hi up."""
        scale = 10**digits
        lo, hi = (self.exact, self.exact) if self.exact is not None else (self.lo, self.hi)
        return (_fixed(math.floor(lo * scale), digits), _fixed(math.ceil(hi * scale), digits))

    def dyadic_dump(self) -> str:
        return f"[{_dyadic(self.lo)}, {_dyadic(self.hi)}]"

    def __repr__(self):
        lo, hi = self.decimal_bounds(12)
        return f"IntervalReal([{lo}, {hi}], prec={self.prec})"


def _fixed(n: int, digits: int) -> str:
    sign = "-" if n < 0 else ""
    s = str(abs(n)).rjust(digits + 1, "0")
    if digits == 0:
        return sign + s
    return f"{sign}{s[:-digits]}.{s[-digits:]}"


def _dyadic(x: Fraction) -> str:
    """Render a dyadic rational as ``±m*2^e``."""
    den = x.denominator
    if den & (den - 1):
        raise ValueError(f"{x} is not dyadic")
    e = -(den.bit_length() - 1)
    m = x.numerator
    if m and e == 0:
        while m % 2 == 0:
            m //= 2
            e += 1
    sign = "-" if m < 0 else "+"
    return f"{sign}{abs(m)}*2^{e}"


def sqrt_interval(r, digits: int) -> IntervalReal:
    """Enclosure of sqrt(r) for a rational r >= 0, via integer square roots."""
    r = Fraction(r)
    if r < 0:
        raise ValueError("square root of a negative number")
    b = bits_for_digits(digits) + 2
    scale = 1 << (2 * b)
    lo_n = math.isqrt(math.floor(r * scale))
    hi_arg = math.ceil(r * scale)
    hi_n = math.isqrt(hi_arg)
    if hi_n * hi_n < hi_arg:
        hi_n += 1
    exact = None
    if r.numerator == math.isqrt(r.numerator) ** 2 and r.denominator == math.isqrt(r.denominator) ** 2:
        exact = Fraction(math.isqrt(r.numerator), math.isqrt(r.denominator))
    return IntervalReal(Fraction(lo_n, 1 << b), Fraction(hi_n, 1 << b), b, exact,
                        producer=lambda d: sqrt_interval(r, d))


def quad_to_interval(u: QuadElem, digits: int) -> IntervalReal:
    """Enclosure of x + y*sqrt(D) of width below 10**-digits."""
    if isinstance(u, (int, Fraction)):
        return IntervalReal.from_fraction(u, digits)
    if u.y == 0:
        return IntervalReal.from_fraction(u.x, digits)
    if u.D < 0:
        raise ValueError("negative radicand: complex values are out of scope")
    y = abs(u.y) + 1
    extra = math.ceil((y.numerator.bit_length() - y.denominator.bit_length() + 1) * 0.30103) + 1
    s = sqrt_interval(u.D, digits + extra + 1)
    ends = (u.x + u.y * s.lo, u.x + u.y * s.hi)
    return IntervalReal(min(ends), max(ends), bits_for_digits(digits + 1),
                        producer=lambda d: quad_to_interval(u, d))


def interval_refine(v: IntervalReal, digits: int, cap: int = ESCALATION_CAP) -> IntervalReal:
    """Recompute ``v`` until its width is below 10**-digits.

    Starts at ``digits + GUARD_DIGITS`` working digits and doubles on each
    failure, giving up after ``cap`` doublings.  The result is intersected with
    the input, so it never grows.
    """
    if v.is_tight(digits):
        return v
    if v.exact is not None:
        return v.intersect(IntervalReal.from_fraction(v.exact, digits + 1))
    if v.producer is None:
        raise PrecisionCapExceeded("enclosure has no recompute hook; cannot refine")
    work = digits + GUARD_DIGITS
    for _ in range(cap + 1):
        r = v.producer(work)
        if r.is_tight(digits):
            return v.intersect(r).with_producer(v.producer)
        work *= 2
    raise PrecisionCapExceeded(f"width 1e-{digits} not reached after {cap} doublings")
