from fractions import Fraction as F

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from cfcert.cf import GeneralizedCF, RegularCF, certified_value, eval_gcf, gcf_approximants, regularize, signed_value
from cfcert.errors import ContractionError, LiftError
from cfcert.families import display_quotients, quotients, t3_stream
from cfcert.transform import (corfl_lift, doubled_sequence, even_part, iterated_lift, lift_ocf, odd_part,
                              odd_part_doubled, worpitzky_check)

nonzero = st.integers(-9, 9).filter(bool)
rat = st.fractions(min_value=-5, max_value=5, max_denominator=6)
nz_rat = rat.filter(bool)


@st.composite
def gcfs(draw, min_terms=2, max_terms=12):
    n = draw(st.integers(min_terms, max_terms))
    terms = [(draw(nz_rat), draw(nz_rat)) for _ in range(n)]
    return GeneralizedCF(draw(rat), terms)


def ones(n=None):
    if n is None:
        return GeneralizedCF.from_functions(1, lambda k: 1, lambda k: 1)
    return GeneralizedCF(1, [(F(1), F(1))] * n)


def same_ratio(x, y):
    (a, b), (c, d) = x, y
    return a * d == b * c and ((a, b) == (0, 0)) == ((c, d) == (0, 0))


# contractions ---------------------------------------------------------------

def test_even_part_of_ones():
    ev = even_part(ones())
    assert eval_gcf(ev, 3) == eval_gcf(ones(), 6) == F(21, 13)


@given(gcfs())
def test_even_part_approximants_match_exactly(g):
    ev = even_part(g)
    src = gcf_approximants(g, len(g.terms()))
    out = gcf_approximants(ev, len(ev.terms()))
    assert len(ev.terms()) == len(g.terms()) // 2
    for k, pair in enumerate(out):
        assert pair == src[2 * k]


@given(gcfs(min_terms=1))
def test_odd_part_approximants(g):
    od = odd_part(g)
    src = gcf_approximants(g, len(g.terms()))
    out = gcf_approximants(od, len(od.terms()))
    assert od.b0 == src[1][0] / src[1][1]
    for k in range(1, len(out)):
        assert same_ratio(out[k], src[2 * k + 1])


def test_odd_part_of_ones():
    od = odd_part(ones())
    assert eval_gcf(od, 1) == eval_gcf(ones(), 3)
    assert eval_gcf(od, 2) == eval_gcf(ones(), 5)


def test_trivial_contractions():
    single = GeneralizedCF(F(3), [(F(2), F(5))])
    assert even_part(single).terms() == [] and even_part(single).b0 == 3
    assert odd_part(GeneralizedCF(0, [(F(2), F(7))])).b0 == F(2, 7)


def test_contraction_zero_denominators():
    with pytest.raises(ContractionError) as ei:
        list(even_part(GeneralizedCF(0, [(F(1), F(1)), (F(1), F(0)), (F(1), F(1))])))
    assert ei.value.index == 2
    with pytest.raises(ContractionError):
        odd_part(GeneralizedCF(0, [(F(1), F(0))]))


def test_even_part_of_tas3_form():
    # [0; b1, eu, fv, eu^2, ...] with b1 = 1, e = f = 1, u = 2, v = 3
    def quotient(n):
        if n == 1:
            return 1
        j = n - 1
        return 2 ** ((j + 1) // 2) if j % 2 else 3 ** (j // 2)
    rcf = RegularCF.from_function(0, quotient)
    ev = even_part(rcf.to_gcf())
    for k in range(1, 11):
        assert eval_gcf(ev, k) == eval_gcf(rcf.to_gcf(), 2 * k)


# doubled sequences ----------------------------------------------------------

def check_doubled(c, n):
    od = odd_part(doubled_sequence(c))
    direct = odd_part_doubled(c)
    assert od.b0 == direct.b0
    for k in range(1, n + 1):
        assert eval_gcf(od, k) == eval_gcf(direct, k)


def test_doubled_constant_fifth():
    c = [F(1, 5)] * 12
    direct = odd_part_doubled(c)
    assert direct.b0 == F(1, 5) and direct.terms(3) == [(F(1, 25), 1)] * 3
    check_doubled(c, 10)


def test_doubled_powers_of_quarter():
    check_doubled(lambda n: F(1, 4**n), 8)


@given(st.lists(nz_rat, min_size=2, max_size=9))
def test_doubled_property(c):
    od = odd_part(doubled_sequence(c))
    direct = odd_part_doubled(c)
    for k in range(1, len(c)):
        a = gcf_approximants(od, k)[-1]
        b = gcf_approximants(direct, k)[-1]
        assert same_ratio(a, b)


def test_doubled_single_and_zero():
    assert odd_part_doubled([F(3, 7)]).b0 == F(3, 7)
    assert odd_part_doubled([F(3, 7)]).terms() == []
    with pytest.raises(ValueError):
        odd_part_doubled([F(1), F(0), F(2)])


# Worpitzky ------------------------------------------------------------------

def const(a):
    return GeneralizedCF.from_functions(0, lambda n: a, lambda n: 1)


def test_worpitzky_examples():
    assert worpitzky_check(const(F(1, 5)), 30)
    assert worpitzky_check(const(F(1, 4)), 30)
    res = worpitzky_check(GeneralizedCF.from_functions(0, lambda n: 1 / (4 - F(1, n)), lambda n: 1), 30)
    assert not res and res.witness == 1


def test_worpitzky_normalizes_denominators():
    # a_n / b_n terms (1, 2): unit form has a_1 = 1/2, a_n = 1/4 afterwards
    g = GeneralizedCF.from_functions(0, lambda n: 1, lambda n: 2)
    assert worpitzky_check(g, 20, start=2)
    assert worpitzky_check(g, 20).witness == 1


# the lift -------------------------------------------------------------------

@st.composite
def liftable(draw):
    p = draw(st.integers(2, 5))
    n = draw(st.integers(0, 7))
    qs = [p * p * draw(st.integers(1, 6)) if j % 2 == 0 else draw(st.integers(1, 30)) for j in range(n)]
    return p, qs


@given(liftable())
def test_finite_lift_adds_reciprocal(case):
    p, qs = case
    base = F(*signed_value([0] + qs))
    P, Q = signed_value([0] + corfl_lift(p, RegularCF(0, qs)).terms())
    assume(Q != 0)
    assert F(P, Q) - base == F(1, p)


def test_lift_example_pattern():
    out = corfl_lift(2, RegularCF(0, [4, 3, 8, 9]))
    assert out.terms() == [2, -1, -2, 3, 2, -2, -2, 9, 2]
    assert regularize(out).terms() == regularize(RegularCF(0, out.terms())).terms()


def test_lift_rejections():
    with pytest.raises(LiftError):
        corfl_lift(1, RegularCF(0, [4]))
    with pytest.raises(LiftError):
        corfl_lift(2, RegularCF(1, [4]))
    with pytest.raises(LiftError) as ei:
        corfl_lift(2, RegularCF(0, [4, 1, 6, 1])).terms()
    assert ei.value.index == 3


def test_lift_guard_rejects_small_quotients():
    # odd quotients p^2 make the c_j = 1/p exceed 1/4
    with pytest.raises(LiftError, match="guard"):
        corfl_lift(2, RegularCF.from_function(0, lambda n: 4 if n % 2 else 1))


def test_lift_ocf_odd_part_matches():
    base = t3_stream(4, 1, 2, 3)
    od = odd_part(lift_ocf(2, base))
    lifted = corfl_lift(2, base)
    for k in range(8):
        P, Q = signed_value([0] + lifted.prefix(2 * k + 1))
        assert eval_gcf(od, k) == F(P, Q)


def test_lift_value_infinite():
    base = t3_stream(4, 1, 2, 3)
    lifted = regularize(corfl_lift(2, base))
    diff = certified_value(lifted, 30) - certified_value(base, 30)
    assert diff.contains(F(1, 2))
    assert diff.width < F(1, 10**29)


def test_t1ex_regularized_matches_display():
    p = {"c": 1, "e": 1, "d": 1, "m": 3, "p": 2}
    assert quotients("t1ex", p, 12).terms() == display_quotients("t1ex", p, 12)


# iterated lifts -------------------------------------------------------------

def test_iterated_lift_empty_is_identity():
    base = t3_stream(1, 1, 2, 3)
    assert iterated_lift([], base).prefix(10) == base.prefix(10)


def test_iterated_lift_eight_quotient_pattern():
    P, Qp, e, f, u, v = 2, 2, 1, 1, 2, 2
    base = t3_stream(e * P**2 * Qp**4, f, u, v)
    out = iterated_lift([P * Qp**2, Qp], base).prefix(16)
    expected = []
    for n in (1, 2):
        expected += [Qp, -P, -Qp, -e * u**n, Qp, P, -Qp, f * v**n]
    assert out == expected


def test_iterated_lift_labels_stage():
    with pytest.raises(LiftError) as ei:
        iterated_lift([2, 3], RegularCF(0, [4, 5, 8, 7])).terms()
    assert ei.value.stage == 1


def test_iterated_lift_value_shift():
    # the second stage needs 3^2 to divide the first stage's p
    base = RegularCF(0, [81, 5, 162, 7])
    P, Q = signed_value([0] + iterated_lift([9, 3], base).terms())
    assert F(P, Q) == F(*signed_value([0, 81, 5, 162, 7])) + F(1, 9) + F(1, 3)
