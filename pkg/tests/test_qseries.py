import random
from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfcert.cf import GeneralizedCF, RegularCF, certified_value, eval_gcf, gcf_approximants, rcf_expand, signed_value
from cfcert.errors import SeriesError
from cfcert.families import quotients, t2_value, t3_stream, t3_value
from cfcert.numerics import QuadElem
from cfcert.qseries import (BesselRatioParams, TasoevSumParams, bessel_type_ratio, elementary_interval,
                            finap2_closed, finite_ap_closed, h1_ratio, q_pochhammer, tasoev_partial, tasoev_sum)

mpmath.mp.dps = 60


def mpf(x: F):
    return mpmath.mpf(x.numerator) / x.denominator


# q-Pochhammer -----------------------------------------------------------------

def test_q_pochhammer_examples():
    assert q_pochhammer(F(5, 7), F(1, 3), 0) == 1
    assert q_pochhammer(F(1, 2), F(1, 2), 2) == F(3, 8)
    assert q_pochhammer(0, F(2, 9), 7) == 1


def test_q_pochhammer_surd():
    z = QuadElem.sqrt(2) / 2
    out = q_pochhammer(z, F(1, 2), 2)
    assert isinstance(out, QuadElem)
    assert out == (1 - z) * (1 - z / 2)


@given(st.fractions(-2, 2, max_denominator=9), st.fractions(-1, 1, max_denominator=9), st.integers(0, 8))
def test_q_pochhammer_recursion(z, q, n):
    assert q_pochhammer(z, q, n + 1) == q_pochhammer(z, q, n) * (1 - z * q**n)


# Tasoevian sums ---------------------------------------------------------------

def test_tasoev_beta_zero():
    s = tasoev_sum(TasoevSumParams(F(0), F(1, 2), F(1, 3)), 30)
    assert s.contains(1) and s.width < F(1, 10**30)


def brute(beta, gamma, q, shift, N):
    total = F(0)
    for n in range(N):
        total += beta**n * q ** (n * (n + shift) // 2) / (q_pochhammer(q, q, n) * q_pochhammer(gamma * q, q, n))
    return total


@pytest.mark.parametrize("shift", [1, 3])
def test_tasoev_brute_force(shift):
    p = TasoevSumParams(F(1), F(0), F(1, 3), shift)
    s = tasoev_sum(p, 40)
    exact30 = brute(F(1), F(0), F(1, 3), shift, 30)
    assert tasoev_partial(p, 30) == exact30
    # the neglected tail after 30 terms is far below 10^-40
    assert s.lo - F(1, 10**40) <= exact30 <= s.hi + F(1, 10**40)


@given(st.fractions(-3, 3, max_denominator=5), st.fractions(-2, 2, max_denominator=5),
       st.fractions(F(-1, 2), F(1, 2), max_denominator=8).filter(bool), st.sampled_from([1, 3]))
@settings(max_examples=25)
def test_tasoev_refinement_nests(beta, gamma, q, shift):
    p = TasoevSumParams(beta, gamma, q, shift)
    try:
        a = tasoev_sum(p, 20)
    except SeriesError:
        return
    b = tasoev_sum(p, 40)
    assert a.lo <= b.lo and b.hi <= a.hi
    partial = tasoev_partial(p, 80)
    assert a.lo - F(1, 10**20) <= partial <= a.hi + F(1, 10**20)


def test_tasoev_rejects_bad_params():
    with pytest.raises(ValueError):
        TasoevSumParams(F(1), F(0), F(1))
    with pytest.raises(ValueError):
        TasoevSumParams(F(1), F(0), F(1, 2), shift=2)


def test_tas1_assembly_matches_cf():
    # c = e = 1, d = 1, m = 2: [0; 3, 5, 9, 17, 33, ...]
    cf = RegularCF.from_function(0, lambda n: 1 + 2**n)
    value = t2_value(1, 1, 1, 2, 50)
    assert value.overlaps(certified_value(cf, 40))
    assert value.width < F(1, 10**40)


# H1 ratio ------------------------------------------------------------------------

def h1_gcf(a, b, c, d, q):
    return GeneralizedCF.from_functions(
        0,
        lambda n: F(1) if n == 1 else -a * b * q ** (2 * n - 3) + c * q ** (n - 2),
        lambda n: F(1) if n == 1 else (a + b) * q ** (n - 1) + d)


def h1_direct(a, b, c, d, q, terms=120):
    return 1 / eval_gcf(h1_gcf(a, b, c, d, q), terms) - 1


def test_h1_prefactor_zero():
    a, b, q = F(2), F(3), F(1, 5)
    r = h1_ratio(a, b, a * b * q, F(1), q, 30)
    assert r.lo == r.hi == 0


def test_h1_tas3_instantiation():
    u, v, e, f = 2, 3, 1, 1
    a, b, c, d, q = F(1), F(u), F(0), F(e * f * u), F(1, u * v)
    r = h1_ratio(a, b, c, d, q, 30)
    direct = h1_direct(a, b, c, d, q, 60)
    assert r.lo - F(1, 10**30) <= direct <= r.hi + F(1, 10**30)
    assert r.width < F(1, 10**30)


def test_h1_random_rationals():
    rng = random.Random(7)
    checked = 0
    while checked < 25:
        q = F(rng.randint(-8, 8), 16)
        if q == 0:
            continue
        a, b = F(rng.randint(-12, 12), 4), F(rng.randint(-12, 12), 4)
        c, d = F(rng.randint(-8, 8), 4), F(rng.randint(4, 12), 4)
        try:
            r = h1_ratio(a, b, c, d, q, 25)
            direct = h1_direct(a, b, c, d, q)
        except (SeriesError, ZeroDivisionError):
            continue
        assert r.lo - F(1, 10**25) <= direct <= r.hi + F(1, 10**25), (a, b, c, d, q)
        checked += 1


def test_h1_rejects():
    with pytest.raises(ValueError):
        h1_ratio(1, 1, 1, 0, F(1, 2), 10)
    with pytest.raises(ValueError):
        h1_ratio(1, 1, 1, 1, F(3, 2), 10)


def test_t3_value_matches_cf():
    cf = t3_stream(1, 1, 2, 3)
    assert t3_value(1, 1, 2, 3, 45).overlaps(certified_value(cf, 40))


# Bessel-type ratios -----------------------------------------------------------

def test_bessel_one_one():
    r = bessel_type_ratio(BesselRatioParams.lehmer(1, 1), 30)
    cf = RegularCF.from_function(0, lambda n: n)
    assert r.overlaps(certified_value(cf, 30))
    recip = 1 / r
    assert abs(recip.mid - F(14331274267, 10**10)) < F(1, 10**10)
    assert abs(mpf(r.mid) - mpmath.besseli(1, 2) / mpmath.besseli(0, 2)) < mpmath.mpf(10) ** -30


def test_bessel_two_four():
    r = bessel_type_ratio(BesselRatioParams.lehmer(2, 4), 30)
    cf = RegularCF.from_function(0, lambda n: 4 * n - 2)
    assert r.overlaps(certified_value(cf, 30))
    e = mpmath.e
    assert abs(mpf(r.mid) - (e - 1) / (e + 1)) < mpmath.mpf(10) ** -30


def test_bessel_scaled_and_interlaced():
    # [0; u a, v(a+b), u(a+2b), ...] with a = 1, b = 2, u = 2, v = 3
    r = bessel_type_ratio(BesselRatioParams.lehmer(1, 2, 2, 3), 30)
    cf = RegularCF.from_function(0, lambda n: (2 if n % 2 else 3) * (1 + 2 * (n - 1)))
    assert r.overlaps(certified_value(cf, 30))
    # [0; a, c, a+b, c+d, ...] with 2bc = d(2a+b): a=1, b=2, c=2, d=2
    r = bessel_type_ratio(BesselRatioParams.interlaced(1, 2, 2), 30)
    cf = RegularCF.from_function(0, lambda n: 1 + (n - 1) // 2 * 2 if n % 2 else 2 + (n // 2 - 1) * 2)
    assert r.overlaps(certified_value(cf, 30))


def test_bessel_pochhammer_zero():
    with pytest.raises(SeriesError):
        bessel_type_ratio(BesselRatioParams(F(-2), F(1)), 10)


# elementary functions -----------------------------------------------------------

def test_tanh_zero():
    r = elementary_interval("tanh", F(0), 20)
    assert r.lo == r.hi == 0


def test_tan_one():
    r = elementary_interval("tan", F(1), 40)
    assert abs(mpf(r.mid) - mpmath.tan(1)) < mpmath.mpf(10) ** -40
    assert F(155740772465, 10**11) < r.lo < r.hi < F(155740772466, 10**11)
    exp = rcf_expand(r, 6)
    assert exp.quotients[:6] == [1, 1, 1, 3, 1, 5]


def test_exp_quarter_against_exp_m():
    r = elementary_interval("exp", F(-1, 4), 35)
    value = 2 * (1 - r)
    cf = quotients("exp_m", {"m": 2}, 60)
    assert value.overlaps(certified_value(cf, 30))


@pytest.mark.parametrize("fn,ref", [("exp", mpmath.exp), ("tan", mpmath.tan), ("tanh", mpmath.tanh)])
def test_surd_arguments(fn, ref):
    x = QuadElem(0, F(1, 3), 2)  # sqrt(2)/3
    r = elementary_interval(fn, x, 35)
    assert abs(mpf(r.mid) - ref(mpmath.sqrt(2) / 3)) < mpmath.mpf(10) ** -35
    assert r.width < F(1, 10**35)


def test_elementary_unknown_function():
    with pytest.raises(ValueError):
        elementary_interval("sin", F(1), 10)


# finite expansions --------------------------------------------------------------

def ap_recurrence(a, b, c, n):
    terms = [(F(-c), F(a + j * b)) for j in range(n)]
    return gcf_approximants(GeneralizedCF(0, terms), n)[-1]


def test_finite_ap_examples():
    assert finite_ap_closed(1, 1, -1, 3) == (7, 10)
    assert F(*signed_value([0, 1, 2, 3])) == F(7, 10)
    assert finite_ap_closed(F(3), F(2), F(5), 1) == (-5, 3)
    with pytest.raises(ValueError):
        finite_ap_closed(1, 1, 1, 0)


@given(st.integers(1, 10), st.integers(1, 10), st.sampled_from([-3, -2, -1, 1, 2, 3]), st.integers(1, 30))
def test_finite_ap_matches_recurrence(a, b, c, n):
    assert finite_ap_closed(a, b, c, n) == ap_recurrence(a, b, c, n)


def test_finite_ap_random_fifteen():
    rng = random.Random(11)
    for _ in range(10):
        a, b = rng.randint(1, 10), rng.randint(1, 10)
        P, Q = finite_ap_closed(a, b, -1, 15)
        assert F(P, Q) == F(*signed_value([0] + [a + j * b for j in range(15)]))


def interlaced(f, g, h, k, n):
    qs = []
    for j in range(n):
        qs += [f + j * h, g + j * k]
    return F(*signed_value([0] + qs))


def test_finap2_examples():
    assert finap2_closed(1, 3, 2, 3, 2) == interlaced(1, 3, 2, 3, 2) == F(*signed_value([0, 1, 3, 3, 6]))
    assert finap2_closed(1, 3, 2, 3, 1) == F(3, 4)
    assert finap2_closed(2, 5, 4, 5, 3) == interlaced(2, 5, 4, 5, 3)


def test_finap2_constraint_residual():
    with pytest.raises(ValueError, match="residual -4"):
        finap2_closed(1, 3, 2, 4, 2)


@given(st.integers(1, 6), st.integers(1, 6), st.integers(1, 6), st.integers(1, 10))
def test_finap2_property(f, h, t, n):
    # choose g so that 2gh = k(2f+h): g = t(2f+h), k = 2th
    g, k = t * (2 * f + h), 2 * t * h
    assert finap2_closed(f, g, h, k, n) == interlaced(f, g, h, k, n)
