from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from cfcert.errors import ParseError, PrecisionCapExceeded, RadicandMismatch
from cfcert.numerics import (IntervalReal, QuadElem, bits_for_digits, factorize, interval_refine, parse_rational,
                             quad, quad_arith, quad_to_interval, sqrt_interval, squarefree_decompose, tolerance)
from cfcert.numerics.rational import format_rational, is_natural

fracs = st.fractions(min_value=-50, max_value=50, max_denominator=40)
radicands = st.sampled_from([2, 3, 5, 6, 7, 10, 11, 13, 15])


# rationals ------------------------------------------------------------------

@pytest.mark.parametrize("text,value", [("3/4", F(3, 4)), ("-7", F(-7)), (" 10 / 4 ", F(5, 2)), ("+2", F(2))])
def test_parse_rational(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("text", ["", "1/0", "1.5", "a/b", "1//2"])
def test_parse_rational_rejects(text):
    with pytest.raises((ParseError, ValueError, ZeroDivisionError)):
        parse_rational(text)


@given(fracs)
def test_format_parse_roundtrip(x):
    assert parse_rational(format_rational(x)) == x


def test_is_natural():
    assert is_natural(F(3)) and not is_natural(F(0)) and not is_natural(F(1, 2))


# square-free decomposition ----------------------------------------------------

@pytest.mark.parametrize("n,s,d", [(12, 2, 3), (50, 5, 2), (7, 1, 7), (1, 1, 1), (72, 6, 2), (-18, 3, -2)])
def test_squarefree_decompose(n, s, d):
    assert squarefree_decompose(n) == (s, d)


def test_factorize_beyond_trial_division():
    p, q = 1_000_003, 2_000_003
    assert factorize(p * q) == {p: 1, q: 1}
    assert squarefree_decompose(p * p * q) == (p, q)


@given(st.integers(1, 10**6))
def test_squarefree_roundtrip(n):
    s, d = squarefree_decompose(n)
    assert s * s * d == n
    assert all(e == 1 for e in factorize(d).values())


# quadratic field ------------------------------------------------------------------

def test_sqrt_normalizes_radicand():
    assert QuadElem.sqrt(12) == QuadElem(0, 2, 3)
    assert QuadElem.sqrt(F(1, 2)) == QuadElem(0, F(1, 2), 2)
    assert QuadElem.sqrt(9).is_rational and QuadElem.sqrt(9).to_fraction() == 3


def test_radicand_collapses_for_squares():
    u = QuadElem(1, 1, 4)
    assert u.D == 1 and u.to_fraction() == 3


def test_mixing_rules():
    r2, r3 = QuadElem.sqrt(2), QuadElem.sqrt(3)
    assert (r2 + 1).D == 2
    with pytest.raises(RadicandMismatch):
        r2 + r3
    with pytest.raises(RadicandMismatch):
        quad_arith("+", quad(1, 0, 2), quad(1, 0, 3))


def test_golden_ratio_identity():
    phi = (1 + QuadElem.sqrt(5)) / 2
    assert phi * phi == phi + 1
    assert phi.norm() == -1 and phi.trace() == 1


@given(fracs, fracs, fracs, fracs, radicands)
def test_field_axioms(x1, y1, x2, y2, D):
    u, v = QuadElem(x1, y1, D), QuadElem(x2, y2, D)
    assert u + v == v + u
    assert u * v == v * u
    assert (u + v) * u == u * u + v * u
    if v:
        assert (u / v) * v == u
        assert v * v.inverse() == 1
    assert (u * v).norm() == u.norm() * v.norm()


@given(fracs, fracs, radicands)
def test_sign_matches_float(x, y, D):
    u = QuadElem(x, y, D)
    val = float(x) + float(y) * D**0.5
    if abs(val) > 1e-9:
        assert u.sign() == (1 if val > 0 else -1)


@given(fracs, fracs, radicands)
def test_quad_to_interval_contains(x, y, D):
    u = QuadElem(x, y, D)
    iv = quad_to_interval(u, 30)
    assert iv.is_tight(30)
    with mpmath.workdps(60):
        q = lambda r: mpmath.mpf(r.numerator) / r.denominator  # noqa: E731
        ref = q(x) + q(y) * mpmath.sqrt(D)
        assert q(iv.lo) <= ref <= q(iv.hi)


def test_negative_radicand_rejected_for_intervals():
    with pytest.raises(ValueError):
        quad_to_interval(QuadElem(0, 1, -1), 10)


# intervals ------------------------------------------------------------------

def test_bits_for_digits():
    assert bits_for_digits(10) == 38
    assert tolerance(3) == F(1, 1000)


def test_from_fraction_is_exact():
    iv = IntervalReal.from_fraction(F(1, 3), 20)
    assert iv.exact == F(1, 3) and iv.contains(F(1, 3)) and iv.is_tight(20)


def test_decimal_bounds_directed():
    lo, hi = IntervalReal.from_fraction(F(2, 3), 10).decimal_bounds(5)
    assert (lo, hi) == ("0.66666", "0.66667")
    lo, hi = IntervalReal.from_fraction(F(-2, 3), 10).decimal_bounds(5)
    assert (lo, hi) == ("-0.66667", "-0.66666")


@given(fracs, fracs, st.sampled_from(["+", "-", "*", "/"]))
def test_arithmetic_contains_exact(x, y, op):
    assume(op != "/" or y != 0)
    a, b = IntervalReal.from_fraction(x, 15), IntervalReal.from_fraction(y, 15)
    fn = {"+": lambda s, t: s + t, "-": lambda s, t: s - t, "*": lambda s, t: s * t, "/": lambda s, t: s / t}[op]
    assert fn(a, b).contains(fn(x, y))
    assert fn(a, y).contains(fn(x, y))


def test_division_by_interval_containing_zero():
    with pytest.raises(ZeroDivisionError):
        IntervalReal.from_fraction(1, 10) / IntervalReal.from_bounds(-1, 1, 10)


def test_sqrt_interval():
    iv = sqrt_interval(2, 40)
    assert iv.is_tight(40) and iv.lo ** 2 <= 2 <= iv.hi ** 2
    assert sqrt_interval(F(9, 4), 10).exact == F(3, 2)


def test_refine_uses_producer_and_never_grows():
    loose = sqrt_interval(2, 5)
    tight = interval_refine(loose, 50)
    assert tight.is_tight(50)
    assert loose.lo <= tight.lo and tight.hi <= loose.hi


def test_refine_without_producer_fails():
    with pytest.raises(PrecisionCapExceeded):
        interval_refine(IntervalReal.from_bounds(0, 1, 10), 20)


def test_dyadic_dump():
    assert IntervalReal(F(1, 2), F(3, 4), 4).dyadic_dump() == "[+1*2^-1, +3*2^-2]"


def test_contains_quad_and_interval():
    iv = quad_to_interval(QuadElem.sqrt(2), 20)
    assert iv.contains(QuadElem.sqrt(2))
    assert not iv.contains(QuadElem.sqrt(3))
    assert iv.hull(IntervalReal.from_fraction(2, 10)).contains(iv)
