import math
from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from cfcert.cf import (GeneralizedCF, RegularCF, certified_value, cf_enclosure, convergents, eval_gcf,
                       equivalence_transform, format_rcf, gcf_approximants, parse_cf_literal, parse_gcf, parse_rcf,
                       rcf_expand, regularize, signed_value)
from cfcert.errors import CFExhausted, ParseError, RegularizationError, ZeroDenominator
from cfcert.numerics import IntervalReal, sqrt_interval
from cfcert.qseries import elementary_interval

quotient_lists = st.lists(st.integers(1, 50), min_size=1, max_size=15)
signed_lists = st.lists(st.integers(-6, 6), min_size=1, max_size=8)


def value_of(head, qs):
    P, Q = signed_value([head] + list(qs))
    return F(P, Q)


# convergents -------------------------------------------------------------------

def test_convergents_example():
    cs = convergents(RegularCF(0, [1, 1, 1, 1, 1]), 5)
    assert cs[5].value == F(5, 8)
    assert convergents(RegularCF(2, [1, 2, 1, 1, 4]), 5)[5].value == F(87, 32)


def test_convergents_exhausted():
    with pytest.raises(CFExhausted):
        convergents(RegularCF(0, [1, 2]), 5)


@given(st.integers(-5, 5), quotient_lists)
def test_convergent_determinant(head, qs):
    cs = convergents(RegularCF(head, qs), len(qs))
    for k in range(1, len(cs)):
        assert cs[k].P * cs[k - 1].Q - cs[k - 1].P * cs[k].Q == (-1) ** (k + 1)
        assert math.gcd(cs[k].P, cs[k].Q) == 1


@given(st.integers(-5, 5), quotient_lists)
def test_convergents_alternate_around_value(head, qs):
    x = value_of(head, qs)
    cs = convergents(RegularCF(head, qs), len(qs))
    for k in range(len(cs) - 1):
        assert (cs[k].value - x) * (-1) ** k <= 0


def test_lazy_infinite_cf():
    cf = RegularCF.from_function(0, lambda n: n)
    assert cf.prefix(4) == [1, 2, 3, 4]
    assert not cf.is_finite
    assert cf.truncate(3).literal() == "[0; 1, 2, 3~]"


# generalized fractions -------------------------------------------------------

def test_eval_gcf_and_zero_denominator():
    g = GeneralizedCF(0, [(F(1), F(1)), (F(1), F(2))])
    assert eval_gcf(g, 2) == F(2, 3)
    with pytest.raises(ZeroDenominator):
        eval_gcf(GeneralizedCF(0, [(F(1), F(0))]), 1)


@given(st.lists(st.tuples(st.fractions(-5, 5, max_denominator=6), st.fractions(-5, 5, max_denominator=6)), min_size=1, max_size=8),
       st.lists(st.fractions(1, 5, max_denominator=6), min_size=8, max_size=8))
def test_equivalence_preserves_approximants(terms, scales):
    g = GeneralizedCF(F(1, 2), terms)
    h = equivalence_transform(g, scales)
    n = len(terms)
    for (A, B), (C, D) in zip(gcf_approximants(g, n), gcf_approximants(h, n)):
        assert A * D == B * C


def test_equivalence_rejects_zero_scale():
    with pytest.raises(ValueError):
        equivalence_transform(GeneralizedCF(0, [(F(1), F(1))]), [0]).terms()


def test_rcf_to_gcf():
    cf = RegularCF(1, [2, 3])
    assert eval_gcf(cf.to_gcf(), 2) == F(10, 7)


# regularization ---------------------------------------------------------------

@pytest.mark.parametrize("items,expected", [
    ([1, 2, 0, 3], [1, 5]),
    ([3, -2], [2, 2]),
    ([1, 2, 3], [1, 2, 3]),
    ([0, 1, -2], [2]),
    ([0, 1, 1], [0, 2]),
])
def test_regularize_examples(items, expected):
    out = regularize(items)
    assert [out.head] + out.terms() == expected
    assert value_of(out.head, out.terms()) == F(*signed_value(items))


def test_regularize_undefined():
    with pytest.raises(RegularizationError):
        regularize([0, 0])


@given(st.integers(-6, 6), signed_lists)
def test_regularize_preserves_value(head, qs):
    P, Q = signed_value([head] + qs)
    assume(Q != 0)
    out = regularize([head] + qs)
    assert all(a >= 1 for a in out.terms())
    assert value_of(out.head, out.terms()) == F(P, Q)


@given(st.integers(-3, 3), quotient_lists)
def test_regularize_idempotent_on_canonical(head, qs):
    assume(qs[-1] >= 2)
    out = regularize([head] + qs)
    assert out.head == head and out.terms() == qs


def test_regularize_infinite_stream():
    # tan 1 before removing signs: [1; -3, 5, -7, ...] shifted as [0; 1, -3, 5, -7, ...]
    signed = RegularCF.from_function(0, lambda n: (2 * n - 1) * (1 if n % 2 else -1))
    out = regularize(signed)
    assert [out.head] + out.prefix(8) == [1, 1, 1, 3, 1, 5, 1, 7, 1][:9]


# certified values ------------------------------------------------------------

def test_certified_value_of_golden_ratio():
    phi = RegularCF.from_function(1, lambda n: 1)
    iv = certified_value(phi, 30)
    assert iv.is_tight(30)
    ref = (1 + sqrt_interval(5, 40)) / 2
    assert iv.overlaps(ref)


def test_cf_enclosure_finite_is_exact():
    enc = cf_enclosure(RegularCF(0, [1, 2, 3]), 30)
    assert enc.exact and enc.interval.exact == F(7, 10)


def test_cf_enclosure_respects_max_terms():
    enc = cf_enclosure(RegularCF.from_function(1, lambda n: 1), 40, max_terms=10)
    assert enc.terms_used == 10 and not enc.interval.is_tight(40)


def test_cf_enclosure_e_mpmath():
    # e = [2; 1, 2, 1, 1, 4, 1, 1, 6, ...]
    e = RegularCF.from_function(2, lambda n: 2 * (n + 1) // 3 if n % 3 == 2 else 1)
    iv = certified_value(e, 40)
    with mpmath.workdps(60):
        ref = mpmath.e
        assert mpmath.mpf(iv.lo.numerator) / iv.lo.denominator <= ref <= mpmath.mpf(iv.hi.numerator) / iv.hi.denominator


# expansion ------------------------------------------------------------------

def test_rcf_expand_rational():
    out = rcf_expand(IntervalReal.from_fraction(F(7, 10), 10), 10)
    assert out.quotients == [0, 1, 2, 3] and out.terminated


def test_rcf_expand_e_ratio():
    E = elementary_interval("exp", 1, 30)
    out = rcf_expand((E - 1) / (E + 1), 8)
    assert out.quotients == [0, 2, 6, 10, 14, 18, 22, 26, 30]


def test_rcf_expand_reports_uncertified_index():
    loose = IntervalReal.from_bounds(F(1, 3) - F(1, 10**6), F(1, 3) + F(1, 10**6), 30)
    out = rcf_expand(loose, 10)
    assert out.uncertified_at is not None


@given(st.integers(-20, 20), quotient_lists)
def test_rcf_expand_matches_euclid(head, qs):
    assume(qs[-1] >= 2)
    x = value_of(head, qs)
    out = rcf_expand(IntervalReal.from_fraction(x, 10), 40)
    assert out.quotients == [head] + qs


# literals -------------------------------------------------------------------

def test_literal_formats():
    assert format_rcf(1, [5]) == "[1; 5]"
    assert RegularCF(0, [1, 2], truncated=True).literal() == "[0; 1, 2~]"
    assert parse_rcf("[1,2,0,3]").terms() == [2, 0, 3]
    assert parse_rcf("[0; 1, 2, ...]").truncated


@given(st.integers(-9, 9), st.lists(st.integers(-9, 9), max_size=6), st.booleans())
def test_rcf_literal_roundtrip(head, qs, trunc):
    cf = RegularCF(head, qs, truncated=trunc)
    back = parse_rcf(cf.literal())
    assert back.head == head and back.terms() == qs and back.truncated == trunc


def test_gcf_literal_roundtrip():
    g = parse_gcf("{1/2; 1:2, -3/4:5}")
    assert g.b0 == F(1, 2) and g.terms() == [(F(1), F(2)), (F(-3, 4), F(5))]
    assert parse_gcf(g.literal()).terms() == g.terms()
    assert isinstance(parse_cf_literal("{0; 1:1}"), GeneralizedCF)


@pytest.mark.parametrize("bad", ["1,2,3", "[; 1]", "[0; x]", "{0; 1}"])
def test_literal_parse_errors(bad):
    with pytest.raises(ParseError):
        parse_cf_literal(bad)
