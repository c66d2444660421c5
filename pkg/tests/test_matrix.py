from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cfcert.cf import RegularCF, convergents
from cfcert.errors import ParseError
from cfcert.matrix import (IDENTITY_TEXTS, Expr, Mat2, MatrixWord, builtin_identities, matrix_word_check,
                           parse_identity, parse_word)


@pytest.mark.parametrize("identity", builtin_identities(), ids=lambda i: i.name)
def test_builtin_identity_holds(identity):
    res = matrix_word_check(identity, samples=100, seed=1)
    assert res.passed and res.samples == 100


@pytest.mark.parametrize("identity", builtin_identities(), ids=lambda i: i.name)
def test_perturbed_identity_fails(identity):
    res = matrix_word_check(identity.perturbed(), samples=100, seed=1)
    assert not res.passed
    assert res.counterexample is not None
    assert res.lhs_value != res.rhs_value
    # the counterexample reproduces deterministically
    env = res.counterexample
    assert identity.perturbed().lhs.evaluate(env) != identity.perturbed().rhs.evaluate(env)


def test_lift_identity_with_wider_range():
    ident = parse_identity(IDENTITY_TEXTS["lift_pair"])
    assert matrix_word_check(ident, samples=50, seed=3, ranges={"a0": (0, 40)})


@given(st.integers(-5, 5), st.lists(st.integers(1, 20), min_size=1, max_size=10))
def test_quotient_word_gives_convergents(head, qs):
    word = parse_word(" ".join(f"Q({x})" for x in [head] + qs))
    m = word.evaluate({})
    cs = convergents(RegularCF(head, qs), len(qs))
    assert m.rows() == ((cs[-1].P, cs[-2].P), (cs[-1].Q, cs[-2].Q))
    assert m.det() == (-1) ** (len(qs) + 1)


def test_sampler_respects_divisibility():
    ident = parse_identity("""
        identity demo
        sym v in 2..9
        sym a in 1..9 where v^2 | a
        lhs Q(a)
        rhs Q(a)
    """)
    import random
    rng = random.Random(0)
    for _ in range(50):
        env = ident.sample(rng)
        assert env["a"] % env["v"] ** 2 == 0


def test_derived_symbols():
    ident = parse_identity(IDENTITY_TEXTS["shift_l_pair"])
    import random
    env = ident.sample(random.Random(5))
    assert env["v"] == env["l"] * env["k"] + 1


def test_expr_evaluation():
    e = Expr("(a^2 - 1)/b")
    assert e({"a": F(3), "b": F(4)}) == 2
    assert e.names == {"a", "b"}


@pytest.mark.parametrize("text", ["__import__('os')", "a.b", "a if b else c", "1.5", "f(x)"])
def test_expr_rejects_unsafe_syntax(text):
    with pytest.raises(ParseError):
        Expr(text)


@pytest.mark.parametrize("text", [
    "identity x\nsym a in 1..3\nlhs Q(a)",
    "identity x\nlhs Q(a)\nrhs Q(a)",
    "identity x\nsym a in 1..3\nlhs Q(a)\nrhs R(1,2,3)",
    "identity x\nsym a in 1..3 where 2 | b\nlhs Q(a)\nrhs Q(a)",
    "identity x\nsym a in 1..3\nlhs Q(a\nrhs Q(a)",
    "identity x\nbogus line\nlhs Q(1)\nrhs Q(1)",
])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_identity(text)


def test_zero_denominator_propagates():
    ident = parse_identity("""
        identity z
        sym a in 0..0
        lhs Q(1/a)
        rhs Q(1)
    """)
    with pytest.raises(ZeroDivisionError):
        matrix_word_check(ident, samples=1)


def test_mat2_identity():
    m = Mat2(F(2), F(3), F(5), F(7))
    assert m @ Mat2.identity() == m
    assert MatrixWord(()).evaluate({}) == Mat2.identity()
