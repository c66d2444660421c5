"""Catalog of continued-fraction families with closed-form values.

Each :class:`FamilySpec` binds a parameter schema and its validity
constraints to two independent computations: a generator of the canonical
partial quotients and a certified evaluator of the closed form.  Families
built from lifts (t1ex, t3ex, hp_*, long24) generate their quotients by
running :func:`corfl_lift` and :func:`regularize`; the displayed periods are
kept alongside as ``display`` fixtures.
"""

from __future__ import annotations

import itertools
import random
import zlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .cf import GeneralizedCF, RegularCF, convergents, eval_gcf, regularize
from .errors import CFError, FamilyError, InvalidParams, ParseError, SeriesError
from .numerics import IntervalReal, QuadElem, parse_rational, format_rational
from .numerics.interval import GUARD_DIGITS, ESCALATION_CAP
from .qseries import (BesselRatioParams, TasoevSumParams, bessel_type_ratio, elementary_interval,
                      finap2_closed, finite_ap_closed, tasoev_sum, to_interval)
from .transform import corfl_lift, iterated_lift, lift_ocf, worpitzky_check

ParamSet = dict


# schema ---------------------------------------------------------------------

INT_SMALL = tuple(range(-3, 11))
INT_POS = tuple(range(1, 11))
INT_GE2 = tuple(range(2, 11))
RATIONALS = tuple(sorted({Fraction(n, d) for d in (1, 2, 3, 4) for n in range(1, 11) if Fraction(n, d) <= 10
                          and (d == 1 or n <= 2 * d)}))
PREFIXES = tuple(tuple(t) for k in range(0, 4) for t in itertools.product(range(1, 4), repeat=k))


@dataclass(frozen=True)
class Param:
    name: str
    kind: str  # "integer", "rational" or "intlist"
    domain: tuple = ()

    def parse(self, text: str):
        text = text.strip()
        if self.kind == "intlist":
            if not text:
                return ()
            try:
                return tuple(int(t) for t in text.split(":"))
            except ValueError:
                raise ParseError(f"{self.name}: expected integers separated by ':', got {text!r}") from None
        try:
            x = parse_rational(text)
        except (ParseError, ValueError):
            raise ParseError(f"{self.name}: cannot parse {text!r} as a number") from None
        if self.kind == "integer":
            if x.denominator != 1:
                raise ParseError(f"{self.name}: expected an integer, got {text!r}")
            return int(x)
        return x

    def format(self, value) -> str:
        if self.kind == "intlist":
            return ":".join(str(v) for v in value)
        return format_rational(value)

    def accepts(self, value) -> bool:
        if self.kind == "intlist":
            return isinstance(value, (tuple, list)) and all(isinstance(v, int) for v in value)
        if self.kind == "integer":
            return isinstance(value, int) or (isinstance(value, Fraction) and value.denominator == 1)
        return isinstance(value, (int, Fraction))


@dataclass(frozen=True)
class Constraint:
    text: str
    check: Callable[[dict], bool]


@dataclass(frozen=True)
class FamilySpec:
    id: str
    provenance: str
    params: tuple[Param, ...]
    constraints: tuple[Constraint, ...]
    build: Callable[[dict], RegularCF | GeneralizedCF]
    value: Callable[[dict, int], IntervalReal] | None = None
    exact_value: Callable[[dict], Fraction] | None = None
    display: Callable[[dict, int], list[int]] | None = None
    note: str = ""
    defaults: dict = field(default_factory=dict)

    @property
    def finite(self) -> bool:
        return self.exact_value is not None

    @property
    def param_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.params)

    def describe(self) -> dict:
        return {
            "id": self.id,
            "provenance": self.provenance,
            "params": [{"name": p.name, "kind": p.kind} for p in self.params],
            "constraints": [c.text for c in self.constraints],
            "finite": self.finite,
            "note": self.note,
        }


_REGISTRY: dict[str, FamilySpec] = {}


def _register(spec: FamilySpec) -> None:
    _REGISTRY[spec.id] = spec


def catalog() -> list[str]:
    return list(_REGISTRY)


def get_family(fid: str) -> FamilySpec:
    try:
        return _REGISTRY[fid]
    except KeyError:
        raise FamilyError(f"unknown family {fid!r}", family=fid) from None


def catalog_document() -> list[dict]:
    return [spec.describe() for spec in _REGISTRY.values()]


# helpers --------------------------------------------------------------------

F = Fraction


def _nat(x) -> bool:
    x = F(x)
    return x.denominator == 1 and x >= 1


def _int(x) -> int:
    x = F(x)
    if x.denominator != 1:
        raise FamilyError(f"non-integer quotient {x}")
    return int(x)


def _guarded(check: Callable[[dict], bool]) -> Callable[[dict], bool]:
    def run(p):
        try:
            return bool(check(p))
        except (ZeroDivisionError, CFError, ValueError, OverflowError):
            return False

    return run


def _display_positive(display_period: Callable[[dict, int], list], n0: int,
                      prefix: Callable[[dict], list] | None = None) -> Constraint:
    """Quasi-period entries are integers >= 1 for every block index n >= n0.

    Entries are affine in a nondecreasing function of n, so checking n0 and
    n0 + 1 (value and growth) covers all n.
    """

    def check(p):
        first, second = display_period(p, n0), display_period(p, n0 + 1)
        head = prefix(p) if prefix else []
        entries = list(head) + list(first) + list(second)
        if any(F(x).denominator != 1 for x in entries):
            return False
        if any(x < 1 for x in list(head) + list(first)):
            return False
        return all(b >= a for a, b in zip(first, second))

    return Constraint("partial quotients positive integers for all n", _guarded(check))


def _display_from(prefix: Callable[[dict], list] | None, period: Callable[[dict, int], list], n0: int):
    def display(p, count):
        out = list(prefix(p)) if prefix else []
        n = n0
        while len(out) < count:
            out.extend(period(p, n))
            n += 1
        return [_int(x) for x in out[:count]]

    return display


def _checked(cf: RegularCF, fid: str) -> RegularCF:
    """Wrap a stream so that a non-canonical quotient surfaces as a FamilyError."""

    def gen():
        for i, a in enumerate(cf, 1):
            if a < 1:
                raise FamilyError(f"non-canonical quotient {a} at index {i}", family=fid)
            yield a

    if cf.is_finite:
        return RegularCF(cf.head, list(gen()), truncated=cf.truncated)
    return RegularCF(cf.head, gen)


def _regularized(signed: RegularCF, fid: str, head: int | None = 0) -> RegularCF:
    try:
        out = regularize(signed)
    except CFError as exc:
        raise FamilyError(f"regularization failed: {exc}", family=fid) from exc
    if head is not None and out.head != head:
        raise FamilyError(f"regularized head {out.head}, expected {head}", family=fid)
    return out


def _certify(compute: Callable[[int], IntervalReal], digits: int, fid: str) -> IntervalReal:
    """Run ``compute`` at growing working precision until the width is below 10**-digits."""
    work = digits + GUARD_DIGITS
    last = None
    for _ in range(ESCALATION_CAP):
        try:
            last = compute(work)
        except SeriesError as exc:
            raise FamilyError(f"series evaluation failed: {exc}", family=fid) from exc
        if last.is_tight(digits):
            return last.with_producer(lambda d: _certify(compute, d, fid))
        work *= 2
    raise FamilyError(f"closed form not tight after {ESCALATION_CAP} escalations", family=fid)


# closed-form building blocks ----------------------------------------------


def t2_ab(c, e) -> tuple[QuadElem, QuadElem]:
    """Roots a < b... of x^2 - e x - e/c, as (a, b) = ((e - s)/2, (e + s)/2), s = sqrt(e^2 + 4e/c)."""
    c, e = F(c), F(e)
    disc = e * e + 4 * e / c
    if disc < 0:
        raise FamilyError(f"e^2 + 4e/c = {disc} < 0")
    s = QuadElem.sqrt(disc)
    return (e - s) / 2, (e + s) / 2


def t2_value(c, e, d, m, work: int) -> IntervalReal:
    """[0; c + (dc/e) m, e + d m^2, c + (dc/e) m^3, ...] as (e/c)/(md + a) * S3/S1.

    Signed d and m are allowed; the series use q = 1/m.
    """
    c, e, d, m = F(c), F(e), F(d), F(m)
    a, b = t2_ab(c, e)
    q = 1 / m
    s3 = tasoev_sum(TasoevSumParams(b / d, -a / (d * m * m), q, 3), work)
    s1 = tasoev_sum(TasoevSumParams(b / d, -a / (d * m), q, 1), work)
    den = m * d + a
    if not den:
        raise FamilyError("md + a vanishes")
    pre = (e / c) / den
    if s1.contains_zero():
        raise SeriesError("denominator series encloses zero")
    return to_interval(pre, work) * s3 / s1


def t3_value(e, f, u, v, work: int) -> IntervalReal:
    """[0; eu, fv, eu^2, fv^2, ...] = 1/(eu) - (S3/S1)/(e^2 f u^2 v + e)."""
    e, f, u, v = F(e), F(f), F(u), F(v)
    q = 1 / (u * v)
    beta = 1 / (e * f)
    s3 = tasoev_sum(TasoevSumParams(beta, -1 / (e * f * u**3 * v**2), q, 3), work)
    s1 = tasoev_sum(TasoevSumParams(beta, -1 / (e * f * u**2 * v), q, 1), work)
    if s1.contains_zero():
        raise SeriesError("denominator series encloses zero")
    tail = s3 / s1 / (e * e * f * u * u * v + e)
    return IntervalReal.from_fraction(1 / (e * u), work) - tail


def prefix_convergents(prefix: Sequence[int]) -> tuple[int, int, int, int]:
    """(P_{k-1}, Q_{k-1}, P_k, Q_k) of [0; a1..ak] with P_{-1}=1, Q_{-1}=0, P_0=0, Q_0=1."""
    k = len(prefix)
    if k == 0:
        return 1, 0, 0, 1
    cs = convergents(RegularCF(0, list(prefix)), k)
    return cs[k - 1].P, cs[k - 1].Q, cs[k].P, cs[k].Q


def apinter_constants(prefix, c, e) -> tuple[int, Fraction, Fraction, int, int]:
    """(k, C, E, P_k, Q_k) with C = Q_{k-1} + P_k + c Q_k and E = Q_{k-1} + P_k + e Q_k."""
    _, Qp, Pk, Qk = prefix_convergents(prefix)
    return len(prefix), Qp + Pk + F(c) * Qk, Qp + Pk + F(e) * Qk, Pk, Qk


def apinter2_value(prefix, c, e, d, m, work: int) -> IntervalReal:
    k, C, E, Pk, Qk = apinter_constants(prefix, c, e)
    s = 1 if k % 2 == 0 else -1
    tail = t2_value(s * C, E, F(d) * Qk, m, work)
    return IntervalReal.from_fraction(F(Pk, Qk), work) + tail / Qk


def fibonacci(n: int) -> int:
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def fib_value(k, c, d, m, work: int) -> IntervalReal:
    """[0; 1 (k times), c + d m, 1 (k times), c + d m^2, ...] for even k."""
    Pk, Qk = fibonacci(k), fibonacci(k + 1)
    C = 2 * fibonacci(k) + F(c) * Qk
    tail = t2_value(C, C, F(d) * Qk, m, work)
    return IntervalReal.from_fraction(F(Pk, Qk), work) + tail / Qk


def lehmer_value(a, b, u, v, work: int) -> IntervalReal:
    return bessel_type_ratio(BesselRatioParams.lehmer(a, b, u, v), work)


def tan_value(u, v, work: int, fn: str = "tan") -> IntervalReal:
    """sqrt(v/u) fn(1/sqrt(uv))."""
    u, v = F(u), F(v)
    uv = u * v
    arg = QuadElem.sqrt(1 / uv)
    scale = QuadElem.sqrt(v / u)
    return to_interval(scale, work) * elementary_interval(fn, arg, work)


def exp_uv_value(u, v, work: int) -> IntervalReal:
    """v (1 - exp(-1/(uv)))."""
    x = elementary_interval("exp", -1 / (F(u) * F(v)), work)
    return (1 - x) * F(v)


def exp_4n2s_value(s, work: int) -> IntervalReal:
    E = elementary_interval("exp", F(1, s), work)
    return (E - 1) / (E + 1)


# quotient streams -----------------------------------------------------------


def t2_stream(c, e, d, m) -> RegularCF:
    """Signed [0; c + (dc/e) m, e + d m^2, c + (dc/e) m^3, ...]; quotient n uses m^n."""
    c, e, d, m = F(c), F(e), F(d), F(m)
    dce = d * c / e
    return RegularCF.from_function(0, lambda n: _int(c + dce * m**n if n % 2 else e + d * m**n))


def t3_stream(e, f, u, v) -> RegularCF:
    e, f = F(e), F(f)
    return RegularCF.from_function(0, lambda n: _int(e * u ** ((n + 1) // 2) if n % 2 else f * v ** (n // 2)))


def apinter2_stream(prefix, c, e, d, m) -> RegularCF:
    k, C, E, _, _ = apinter_constants(prefix, c, e)
    c, e, d, m = F(c), F(e), F(d), F(m)
    L = 2 * k + 2

    def q(n):
        i = n - 1
        blk, r = i // L + 1, i % L
        if r < k:
            return prefix[r]
        if r == k:
            return _int(c + C / E * d * m ** (2 * blk - 1))
        if r < 2 * k + 1:
            return prefix[r - k - 1]
        return _int(e + d * m ** (2 * blk))

    return RegularCF.from_function(0, q)


def apinter_stream(prefix, c, d, m) -> RegularCF:
    k = len(prefix)
    c, d = F(c), F(d)

    def q(n):
        i = n - 1
        blk, r = i // (k + 1) + 1, i % (k + 1)
        return prefix[r] if r < k else _int(c + d * m**blk)

    return RegularCF.from_function(0, q)


def lehmer_stream(a, b, u=1, v=1) -> RegularCF:
    return RegularCF.from_function(0, lambda n: (u if n % 2 else v) * (a + (n - 1) * b))


def interlaced_stream(a, b, c, d) -> RegularCF:
    return RegularCF.from_function(0, lambda n: a + (n - 1) // 2 * b if n % 2 else c + (n // 2 - 1) * d)


def tan_stream(u, v, sign: int = -1) -> RegularCF:
    """[0; u, sign*3v, 5u, sign*7v, ...]."""
    return RegularCF.from_function(0, lambda n: (2 * n - 1) * (u if n % 2 else sign * v))


def exp_stream(u, v) -> RegularCF:
    """Signed [0; (4k+1)u, 2v, -(4k+3)u, -2v] for k >= 0."""

    def q(n):
        k, r = divmod(n - 1, 4)
        return ((4 * k + 1) * u, 2 * v, -(4 * k + 3) * u, -2 * v)[r]

    return RegularCF.from_function(0, q)


def lift_guard(p: int, base: RegularCF, terms: int = 50) -> bool:
    return bool(worpitzky_check(lift_ocf(p, base), terms, start=2))


def lifted(fid: str, p: int, base: RegularCF) -> RegularCF:
    try:
        signed = corfl_lift(p, base)
    except CFError as exc:
        raise FamilyError(f"lift failed: {exc}", family=fid) from exc
    return _checked(_regularized(signed, fid), fid)


# parameter access -----------------------------------------------------------


def _g(p: dict, *names):
    return tuple(p[n] for n in names)


def C(text: str, check: Callable[[dict], bool]) -> Constraint:
    return Constraint(text, _guarded(check))


# families -------------------------------------------------------------------

I, R, L = "integer", "rational", "intlist"


def _spec(fid, prov, params, constraints, build, value=None, *, exact=None, display=None, note="", defaults=None):
    _register(FamilySpec(fid, prov, tuple(params), tuple(constraints), build, value, exact, display, note,
                         defaults or {}))


# tas1 ---------------------------------------------------------------------

def _tas1_period(p, n):
    c, d, m = _g(p, "c", "d", "m")
    return [F(c) + F(d) * m**n]


_spec("tas1", "tas1",
      [Param("c", I, INT_SMALL), Param("d", R, RATIONALS), Param("m", I, INT_GE2)],
      [C("m > 1", lambda p: p["m"] > 1),
       C("d > 0", lambda p: p["d"] > 0),
       C("dm ∈ ℕ", lambda p: _nat(p["d"] * p["m"])),
       C("c + dm > 0", lambda p: p["c"] + p["d"] * p["m"] > 0),
       C("c ≠ 0", lambda p: p["c"] != 0),
       _display_positive(_tas1_period, 1)],
      lambda p: t2_stream(p["c"], p["c"], p["d"], p["m"]),
      lambda p, w: t2_value(p["c"], p["c"], p["d"], p["m"], w),
      display=_display_from(None, _tas1_period, 1))


# tas2 family and its sign variants -----------------------------------------

def _t2_common(p):
    return [C("m > 1", lambda p: p["m"] > 1),
            C("c ≠ 0", lambda p: p["c"] != 0),
            C("e ≠ 0", lambda p: p["e"] != 0),
            C("d > 0", lambda p: p["d"] > 0),
            C("dm² ∈ ℕ", lambda p: _nat(p["d"] * p["m"] ** 2)),
            C("dcm/e ∈ ℤ", lambda p: F(p["d"] * p["c"] * p["m"], p["e"]).denominator == 1),
            C("e² + 4e/c ≥ 0", lambda p: F(p["e"]) ** 2 + F(4 * p["e"], p["c"]) >= 0)]


def _tas2_period(p, n):
    c, e, d, m = _g(p, "c", "e", "d", "m")
    return [c + F(d * c, e) * m ** (2 * n - 1), e + d * m ** (2 * n)]


_T2_PARAMS = [Param("c", I, INT_SMALL), Param("e", I, INT_SMALL), Param("d", R, RATIONALS), Param("m", I, INT_GE2)]

_spec("tas2", "tas2", _T2_PARAMS,
      _t2_common(None) + [
          C("c + dcm/e > 0", lambda p: p["c"] + F(p["d"] * p["c"] * p["m"], p["e"]) > 0),
          C("e + dm² > 0", lambda p: p["e"] + p["d"] * p["m"] ** 2 > 0),
          _display_positive(_tas2_period, 1)],
      lambda p: t2_stream(*_g(p, "c", "e", "d", "m")),
      lambda p, w: t2_value(*_g(p, "c", "e", "d", "m"), w),
      display=_display_from(None, _tas2_period, 1))


def _neg_i_period(p, n):
    c, e, d, m = _g(p, "c", "e", "d", "m")
    return [1, F(d * c, e) * m ** (2 * n - 1) - c - 2, 1, d * m ** (2 * n) + e - 2]


def _neg_i_build(p):
    c, e, d, m = _g(p, "c", "e", "d", "m")
    out = _regularized(t2_stream(c, e, d, -m), "tas2_neg_i", head=-1)
    return _checked(RegularCF(0, lambda: iter(out)), "tas2_neg_i")


_spec("tas2_neg_i", "tas1-1", _T2_PARAMS,
      _t2_common(None) + [
          C("dcm/e − c − 2 > 0", lambda p: F(p["d"] * p["c"] * p["m"], p["e"]) - p["c"] - 2 > 0),
          C("dm² + e − 2 > 0", lambda p: p["d"] * p["m"] ** 2 + p["e"] - 2 > 0),
          _display_positive(_neg_i_period, 1)],
      _neg_i_build,
      lambda p, w: t2_value(p["c"], p["e"], p["d"], -p["m"], w) + 1,
      display=_display_from(None, _neg_i_period, 1),
      note="the m -> -m expansion regularizes to head -1; dropping it adds one to the value")


def _neg_ii_prefix(p):
    c, e, d, m = _g(p, "c", "e", "d", "m")
    return [F(d * c * m, e) + c - 1]


def _neg_ii_period(p, n):
    c, e, d, m = _g(p, "c", "e", "d", "m")
    return [1, d * m ** (2 * n) - e - 2, 1, F(d * c, e) * m ** (2 * n + 1) + c - 2]


_spec("tas2_neg_ii", "tas1-2", _T2_PARAMS,
      _t2_common(None) + [
          C("dcm/e + c − 1 > 0", lambda p: F(p["d"] * p["c"] * p["m"], p["e"]) + p["c"] - 1 > 0),
          C("dm² − e − 2 > 0", lambda p: p["d"] * p["m"] ** 2 - p["e"] - 2 > 0),
          _display_positive(_neg_ii_period, 1, _neg_ii_prefix)],
      lambda p: _checked(_regularized(t2_stream(p["c"], p["e"], -p["d"], -p["m"]), "tas2_neg_ii"), "tas2_neg_ii"),
      lambda p, w: t2_value(p["c"], p["e"], -p["d"], -p["m"], w),
      display=_display_from(_neg_ii_prefix, _neg_ii_period, 1))


# tas3 ---------------------------------------------------------------------

def _tas3_period(p, n):
    e, f, u, v = _g(p, "e", "f", "u", "v")
    return [e * u**n, f * v**n]


_T3_CONSTRAINTS = [C("u > 1", lambda p: p["u"] > 1),
                   C("v > 1", lambda p: p["v"] > 1),
                   C("eu ∈ ℕ", lambda p: _nat(p["e"] * p["u"])),
                   C("fv ∈ ℕ", lambda p: _nat(p["f"] * p["v"]))]

_spec("tas3", "tas3",
      [Param("e", R, RATIONALS), Param("f", R, RATIONALS), Param("u", I, INT_GE2), Param("v", I, INT_GE2)],
      _T3_CONSTRAINTS + [_display_positive(_tas3_period, 1)],
      lambda p: t3_stream(*_g(p, "e", "f", "u", "v")),
      lambda p, w: t3_value(*_g(p, "e", "f", "u", "v"), w),
      display=_display_from(None, _tas3_period, 1))


# prefixed Tasoevian families ----------------------------------------------

def _api2_period(p, n):
    pre, c, e, d, m = _g(p, "prefix", "c", "e", "d", "m")
    _, Cc, E, _, _ = apinter_constants(pre, c, e)
    return list(pre) + [c + Cc / E * d * m ** (2 * n - 1)] + list(pre) + [e + d * m ** (2 * n)]


def _api2_constraints(parity: int):
    sign = 1 if parity == 0 else -1

    def consts(p):
        return apinter_constants(p["prefix"], p["c"], p["e"])

    return [C("k even, k ≥ 2" if parity == 0 else "k odd", lambda p: len(p["prefix"]) % 2 == parity
              and len(p["prefix"]) >= (2 if parity == 0 else 1)),
            C("prefix entries ≥ 1", lambda p: all(a >= 1 for a in p["prefix"])),
            C("m > 1", lambda p: p["m"] > 1),
            C("d > 0", lambda p: p["d"] > 0),
            C("C ≠ 0", lambda p: consts(p)[1] != 0),
            C("E ≠ 0", lambda p: consts(p)[2] != 0),
            C("dm ∈ ℕ", lambda p: _nat(p["d"] * p["m"])),
            C("(C/E)dm ∈ ℤ", lambda p: (consts(p)[1] / consts(p)[2] * p["d"] * p["m"]).denominator == 1),
            C("E² + 4E/C ≥ 0" if parity == 0 else "E² − 4E/C ≥ 0",
              lambda p: consts(p)[2] ** 2 + sign * 4 * consts(p)[2] / consts(p)[1] >= 0),
            _display_positive(_api2_period, 1)]


_API2_PARAMS = [Param("c", I, INT_SMALL), Param("e", I, INT_SMALL), Param("d", R, RATIONALS),
                Param("m", I, INT_GE2), Param("prefix", L, PREFIXES)]


def _api2_build(fid):
    def build(p):
        signed = apinter2_stream(*_g(p, "prefix", "c", "e", "d", "m"))
        return _checked(_regularized(signed, fid), fid)

    return build


for _fid, _prov, _par in (("apinter2_even", "tas1ex21", 0), ("apinter2_odd", "tas1ex22", 1)):
    _spec(_fid, _prov, _API2_PARAMS, _api2_constraints(_par), _api2_build(_fid),
          lambda p, w: apinter2_value(*_g(p, "prefix", "c", "e", "d", "m"), w),
          display=_display_from(None, _api2_period, 1))


def _api_period(p, n):
    pre, c, d, m = _g(p, "prefix", "c", "d", "m")
    return list(pre) + [c + d * m**n]


def _api_consts(p):
    return apinter_constants(p["prefix"], p["c"], p["c"])


_spec("apinter", "tas1ex",
      [Param("c", I, INT_SMALL), Param("d", R, RATIONALS), Param("m", I, INT_GE2), Param("prefix", L, PREFIXES)],
      [C("prefix entries ≥ 1", lambda p: all(a >= 1 for a in p["prefix"])),
       C("m > 1", lambda p: p["m"] > 1),
       C("d > 0", lambda p: p["d"] > 0),
       C("dm ∈ ℕ", lambda p: _nat(p["d"] * p["m"])),
       C("C ≠ 0", lambda p: _api_consts(p)[1] != 0),
       C("C² + 4 ≥ 0 (k even) or C² − 4 ≥ 0 (k odd)",
         lambda p: _api_consts(p)[1] ** 2 + (4 if len(p["prefix"]) % 2 == 0 else -4) >= 0),
       _display_positive(_api_period, 1)],
      lambda p: _checked(_regularized(apinter_stream(*_g(p, "prefix", "c", "d", "m")), "apinter"), "apinter"),
      lambda p, w: apinter2_value(p["prefix"], p["c"], p["c"], p["d"], p["m"], w),
      display=_display_from(None, _api_period, 1))


def _fib_period(p, n):
    k, c, d, m = _g(p, "k", "c", "d", "m")
    return [1] * k + [c + d * m**n]


_spec("fib_prefix", "tas1ex1a",
      [Param("k", I, (2, 4, 6, 8, 10)), Param("c", I, INT_SMALL), Param("d", R, RATIONALS), Param("m", I, INT_GE2)],
      [C("k even, k ≥ 2", lambda p: p["k"] >= 2 and p["k"] % 2 == 0),
       C("m > 1", lambda p: p["m"] > 1),
       C("d > 0", lambda p: p["d"] > 0),
       C("dm ∈ ℕ", lambda p: _nat(p["d"] * p["m"])),
       C("2F_k + cF_{k+1} ≠ 0", lambda p: 2 * fibonacci(p["k"]) + p["c"] * fibonacci(p["k"] + 1) != 0),
       _display_positive(_fib_period, 1)],
      lambda p: apinter_stream((1,) * p["k"], p["c"], p["d"], p["m"]),
      lambda p, w: fib_value(*_g(p, "k", "c", "d", "m"), w),
      display=_display_from(None, _fib_period, 1))


# lifted Tasoevian families --------------------------------------------------

def _t1ex_period(p, n):
    c, e, d, m, q = _g(p, "c", "e", "d", "m", "p")
    return [q - 1, 1, c + F(d * c, e) * m ** (2 * n - 1) - 1, q - 1, 1, e + d * m ** (2 * n) - 1]


def _t1ex_base(p):
    c, e, d, m, q = _g(p, "c", "e", "d", "m", "p")
    return t2_stream(c * q * q, e, d, m)


_spec("t1ex", "tas2ex", _T2_PARAMS + [Param("p", I, INT_GE2)],
      [C("p > 1", lambda p: p["p"] > 1)] + _t2_common(None)[:-1] + [
          C("e² + 4e/(cp²) ≥ 0", lambda p: F(p["e"]) ** 2 + F(4 * p["e"], p["c"] * p["p"] ** 2) >= 0),
          C("c + dcm/e − 1 > 0", lambda p: p["c"] + F(p["d"] * p["c"] * p["m"], p["e"]) - 1 > 0),
          C("e + dm² − 1 > 0", lambda p: p["e"] + p["d"] * p["m"] ** 2 - 1 > 0),
          _display_positive(_t1ex_period, 1),
          C("lift convergence guard", lambda p: lift_guard(p["p"], _t1ex_base(p)))],
      lambda p: lifted("t1ex", p["p"], _t1ex_base(p)),
      lambda p, w: t2_value(p["c"] * p["p"] ** 2, *_g(p, "e", "d", "m"), w) + F(1, p["p"]),
      display=_display_from(None, _t1ex_period, 1))


def _t3ex_period(p, n):
    e, f, u, v, q = _g(p, "e", "f", "u", "v", "p")
    return [q - 1, 1, e * u**n - 1, q - 1, 1, f * v**n - 1]


def _t3ex_base(p):
    e, f, u, v, q = _g(p, "e", "f", "u", "v", "p")
    return t3_stream(e * q * q, f, u, v)


_spec("t3ex", "tas3ex",
      [Param("e", R, RATIONALS), Param("f", R, RATIONALS), Param("u", I, INT_GE2), Param("v", I, INT_GE2),
       Param("p", I, INT_GE2)],
      [C("p > 1", lambda p: p["p"] > 1)] + _T3_CONSTRAINTS + [
          C("eu − 1 ∈ ℕ", lambda p: _nat(p["e"] * p["u"] - 1)),
          C("fv − 1 ∈ ℕ", lambda p: _nat(p["f"] * p["v"] - 1)),
          _display_positive(_t3ex_period, 1),
          C("lift convergence guard", lambda p: lift_guard(p["p"], _t3ex_base(p)))],
      lambda p: lifted("t3ex", p["p"], _t3ex_base(p)),
      lambda p, w: t3_value(p["e"] * p["p"] ** 2, *_g(p, "f", "u", "v"), w) + F(1, p["p"]),
      display=_display_from(None, _t3ex_period, 1))


# Bessel-type families -------------------------------------------------------

def _lehmer_period(p, n):
    a, b = _g(p, "a", "b")
    u, v = p.get("u", 1), p.get("v", 1)
    return [u * (a + 2 * n * b), v * (a + (2 * n + 1) * b)]


_spec("lehmer_ap", "lehmer1", [Param("a", I, INT_POS), Param("b", I, INT_POS)],
      [C("a ≥ 1", lambda p: p["a"] >= 1), C("b ≥ 1", lambda p: p["b"] >= 1)],
      lambda p: lehmer_stream(p["a"], p["b"]),
      lambda p, w: lehmer_value(p["a"], p["b"], 1, 1, w),
      display=_display_from(None, _lehmer_period, 0))

_spec("lehmer_ap_scaled", "lehmer2",
      [Param("a", I, INT_POS), Param("b", I, INT_POS), Param("u", I, INT_POS), Param("v", I, INT_POS)],
      [C("a ≥ 1", lambda p: p["a"] >= 1), C("b ≥ 1", lambda p: p["b"] >= 1),
       C("u ≥ 1", lambda p: p["u"] >= 1), C("v ≥ 1", lambda p: p["v"] >= 1)],
      lambda p: lehmer_stream(*_g(p, "a", "b", "u", "v")),
      lambda p, w: lehmer_value(*_g(p, "a", "b", "u", "v"), w),
      display=_display_from(None, _lehmer_period, 0))


def _interlaced_period(p, n):
    a, b, c, d = _g(p, "a", "b", "c", "d")
    return [a + n * b, c + n * d]


_spec("lehmer_interlaced", "lehmer-interlaced",
      [Param("a", I, INT_POS), Param("b", I, INT_POS), Param("c", I, INT_POS), Param("d", I, INT_POS)],
      [C("2bc = d(2a+b)", lambda p: 2 * p["b"] * p["c"] == p["d"] * (2 * p["a"] + p["b"])),
       C("a, b, c, d ≥ 1", lambda p: min(_g(p, "a", "b", "c", "d")) >= 1)],
      lambda p: interlaced_stream(*_g(p, "a", "b", "c", "d")),
      lambda p, w: bessel_type_ratio(BesselRatioParams.interlaced(*_g(p, "a", "b", "d")), w),
      display=_display_from(None, _interlaced_period, 0))


# elementary-function families ---------------------------------------------

def _tan_prefix(p):
    return [p["u"] - 1]


def _tan_period(p, n):
    u, v = _g(p, "u", "v")
    return [1, (4 * n - 1) * v - 2, 1, (4 * n + 1) * u - 2]


_UV = [Param("u", I, INT_POS), Param("v", I, INT_POS)]

_spec("tan_uv", "tan2", _UV,
      [C("u ≥ 1", lambda p: p["u"] >= 1), C("v ≥ 1", lambda p: p["v"] >= 1),
       _display_positive(_tan_period, 1)],
      lambda p: _checked(_regularized(tan_stream(p["u"], p["v"], -1), "tan_uv", head=None), "tan_uv"),
      lambda p, w: tan_value(p["u"], p["v"], w, "tan"),
      display=_display_from(_tan_prefix, _tan_period, 1),
      note="for u = 1 the leading 0 of the displayed form is absorbed by regularization")


def _tanh_period(p, n):
    u, v = _g(p, "u", "v")
    return [(4 * n + 1) * u, (4 * n + 3) * v]


_spec("tanh_uv", "tanh2", _UV,
      [C("u ≥ 1", lambda p: p["u"] >= 1), C("v ≥ 1", lambda p: p["v"] >= 1)],
      lambda p: tan_stream(p["u"], p["v"], 1),
      lambda p, w: tan_value(p["u"], p["v"], w, "tanh"),
      display=_display_from(None, _tanh_period, 0))


def _exp_prefix(p):
    return [p.get("u", p.get("m"))]


def _exp_period(p, n):
    u = p.get("u", p.get("m"))
    v = p.get("v", p.get("m"))
    return [2 * v - 1, 1, (2 * n + 1) * u - 1]


_spec("exp_m", "eeqm", [Param("m", I, INT_POS)],
      [C("m ≥ 1", lambda p: p["m"] >= 1), _display_positive(_exp_period, 1, _exp_prefix)],
      lambda p: _checked(_regularized(exp_stream(p["m"], p["m"]), "exp_m"), "exp_m"),
      lambda p, w: exp_uv_value(p["m"], p["m"], w),
      display=_display_from(_exp_prefix, _exp_period, 1))

_spec("exp_uv", "eeqm2", _UV,
      [C("u ≥ 1", lambda p: p["u"] >= 1), C("v ≥ 1", lambda p: p["v"] >= 1),
       _display_positive(_exp_period, 1, _exp_prefix)],
      lambda p: _checked(_regularized(exp_stream(p["u"], p["v"]), "exp_uv"), "exp_uv"),
      lambda p, w: exp_uv_value(p["u"], p["v"], w),
      display=_display_from(_exp_prefix, _exp_period, 1))

_spec("exp_4n2s", "exp-4n2s", [Param("s", I, INT_POS)],
      [C("s ≥ 1", lambda p: p["s"] >= 1)],
      lambda p: RegularCF.from_function(0, lambda n: (4 * n - 2) * p["s"]),
      lambda p, w: exp_4n2s_value(p["s"], w),
      display=_display_from(None, lambda p, n: [(4 * n + 2) * p["s"]], 0))


# lifted Hurwitzian families -------------------------------------------------

def _hp_lehmer_period(p, n):
    a, b, q, u, v = _g(p, "a", "b", "p", "u", "v")
    return [q - 1, 1, u * (a + 2 * n * b) - 1, q - 1, 1, v * (a + (2 * n + 1) * b) - 1]


def _hp_lehmer_base(p):
    a, b, q, u, v = _g(p, "a", "b", "p", "u", "v")
    return lehmer_stream(a, b, u * q * q, v)


_spec("hp_lehmer", "lehmer2p",
      [Param("a", I, INT_POS), Param("b", I, INT_POS), Param("p", I, INT_GE2), Param("u", I, INT_POS),
       Param("v", I, INT_POS)],
      [C("p ≥ 2", lambda p: p["p"] >= 2),
       C("a ≥ 1", lambda p: p["a"] >= 1), C("b ≥ 1", lambda p: p["b"] >= 1),
       C("ua ≥ 2", lambda p: p["u"] * p["a"] >= 2),
       C("v(a+b) ≥ 2", lambda p: p["v"] * (p["a"] + p["b"]) >= 2),
       _display_positive(_hp_lehmer_period, 0),
       C("lift convergence guard", lambda p: lift_guard(p["p"], _hp_lehmer_base(p)))],
      lambda p: lifted("hp_lehmer", p["p"], _hp_lehmer_base(p)),
      lambda p, w: lehmer_value(p["a"], p["b"], p["u"] * p["p"] ** 2, p["v"], w) + F(1, p["p"]),
      display=_display_from(None, _hp_lehmer_period, 0))


def _hp_tan_period(p, n):
    q, u, v = _g(p, "p", "u", "v")
    return [1, (4 * n + 1) * u - 1, q, (4 * n + 3) * v - 1, 1, q - 2]


def _hp_prefix(p):
    return [p["p"] - 1]


_HP_PARAMS = [Param("p", I, INT_GE2), Param("u", I, INT_POS), Param("v", I, INT_POS)]

_spec("hp_tan", "tan2p", _HP_PARAMS,
      [C("p ≥ 3", lambda p: p["p"] >= 3), C("u ≥ 2", lambda p: p["u"] >= 2), C("v ≥ 1", lambda p: p["v"] >= 1),
       _display_positive(_hp_tan_period, 0, _hp_prefix),
       C("lift convergence guard", lambda p: lift_guard(p["p"], tan_stream(p["u"] * p["p"] ** 2, p["v"], -1)))],
      lambda p: lifted("hp_tan", p["p"], tan_stream(p["u"] * p["p"] ** 2, p["v"], -1)),
      lambda p, w: tan_value(p["u"] * p["p"] ** 2, p["v"], w, "tan") + F(1, p["p"]),
      display=_display_from(_hp_prefix, _hp_tan_period, 0))


def _hp_tanh_period(p, n):
    q, u, v = _g(p, "p", "u", "v")
    return [q - 1, 1, (4 * n + 1) * u - 1, q - 1, 1, (4 * n + 3) * v - 1]


_spec("hp_tanh", "tanh2p", _HP_PARAMS,
      [C("p ≥ 2", lambda p: p["p"] >= 2), C("u ≥ 2", lambda p: p["u"] >= 2), C("v ≥ 1", lambda p: p["v"] >= 1),
       _display_positive(_hp_tanh_period, 0),
       C("lift convergence guard", lambda p: lift_guard(p["p"], tan_stream(p["u"] * p["p"] ** 2, p["v"], 1)))],
      lambda p: lifted("hp_tanh", p["p"], tan_stream(p["u"] * p["p"] ** 2, p["v"], 1)),
      lambda p, w: tan_value(p["u"] * p["p"] ** 2, p["v"], w, "tanh") + F(1, p["p"]),
      display=_display_from(None, _hp_tanh_period, 0))


def _hp_exp_period(p, n):
    q, u, v = _g(p, "p", "u", "v")
    return [1, (4 * n + 1) * u - 1, q - 1, 1, 2 * v - 1, q, (4 * n + 3) * u - 1, 1, q - 1, 2 * v - 1, 1, q - 2]


_spec("hp_exp", "e2p", _HP_PARAMS,
      [C("p ≥ 3", lambda p: p["p"] >= 3), C("u ≥ 2", lambda p: p["u"] >= 2), C("v ≥ 1", lambda p: p["v"] >= 1),
       _display_positive(_hp_exp_period, 0, _hp_prefix),
       C("lift convergence guard", lambda p: lift_guard(p["p"], exp_stream(p["u"] * p["p"] ** 2, p["v"])))],
      lambda p: lifted("hp_exp", p["p"], exp_stream(p["u"] * p["p"] ** 2, p["v"])),
      lambda p, w: exp_uv_value(p["u"] * p["p"] ** 2, p["v"], w) + F(1, p["p"]),
      display=_display_from(_hp_prefix, _hp_exp_period, 0),
      note="display read as one 12-entry period; matches the lifted stream")


# 24-entry quasi-period ------------------------------------------------------

def _long24_period(p, n):
    e, f, P, Qp, r, u, v = _g(p, "e", "f", "p", "q", "r", "u", "v")
    A, B = e * u**n, f * v**n
    return [r - 1, 1, Qp - 1, r, P - 1, 1, r - 1, Qp - 1, 1, r - 1, A - 1, 1,
            r - 2, 1, Qp - 1, r - 1, 1, P - 1, r, Qp - 1, 1, r - 2, 1, B - 1]


def _long24_ps(p):
    P, Qp, r = _g(p, "p", "q", "r")
    return [P * Qp**2 * r**4, Qp * r**2, r]


def _long24_base(p):
    e, f, P, Qp, r, u, v = _g(p, "e", "f", "p", "q", "r", "u", "v")
    return t3_stream(e * P**2 * Qp**4 * r**8, f, u, v)


def _long24_build(p):
    try:
        signed = iterated_lift(_long24_ps(p), _long24_base(p))
    except CFError as exc:
        raise FamilyError(f"lift failed: {exc}", family="long24") from exc
    return _checked(_regularized(signed, "long24"), "long24")


def _long24_value(p, w):
    P, Qp, r = _g(p, "p", "q", "r")
    e, f, u, v = _g(p, "e", "f", "u", "v")
    shift = sum(F(1, x) for x in _long24_ps(p))
    return t3_value(e * P**2 * Qp**4 * r**8, f, u, v, w) + shift


def _long24_guard(p):
    out = _long24_base(p)
    for x in _long24_ps(p):
        if not lift_guard(x, out):
            return False
        out = corfl_lift(x, out)
    return True


_spec("long24", "lcfeq",
      [Param("e", I, INT_POS), Param("f", I, INT_POS), Param("p", I, INT_GE2), Param("q", I, INT_GE2),
       Param("r", I, INT_GE2), Param("u", I, INT_GE2), Param("v", I, INT_GE2)],
      [C("p > 1", lambda p: p["p"] > 1), C("q > 1", lambda p: p["q"] > 1), C("r > 2", lambda p: p["r"] > 2),
       C("u > 1", lambda p: p["u"] > 1), C("v > 1", lambda p: p["v"] > 1),
       C("e ≥ 1", lambda p: p["e"] >= 1), C("f ≥ 1", lambda p: p["f"] >= 1),
       _display_positive(_long24_period, 1),
       C("lift convergence guard", _long24_guard)],
      _long24_build, _long24_value,
      display=_display_from(None, _long24_period, 1))


# finite families ------------------------------------------------------------

def _fin_ap_gcf(p) -> GeneralizedCF:
    a, b, c, n = _g(p, "a", "b", "c", "n")
    return GeneralizedCF(0, [(F(c), F(a + j * b)) for j in range(n)])


def _fin_ap_build(p):
    if p["c"] == 1:
        return RegularCF(0, [p["a"] + j * p["b"] for j in range(p["n"])])
    return _fin_ap_gcf(p)


def _fin_ap_exact(p) -> Fraction:
    P, Q = finite_ap_closed(p["a"], p["b"], -p["c"], p["n"])
    return F(P) / F(Q)


_spec("fin_ap", "finap1",
      [Param("a", I, INT_POS), Param("b", I, INT_POS), Param("c", I, INT_POS), Param("n", I, INT_POS)],
      [C("a ≥ 1", lambda p: p["a"] >= 1), C("b ≥ 1", lambda p: p["b"] >= 1), C("c ≥ 1", lambda p: p["c"] >= 1),
       C("n ≥ 1", lambda p: p["n"] >= 1)],
      _fin_ap_build, exact=_fin_ap_exact, defaults={"c": 1},
      note="c ≠ 1 gives a generalized fraction K(c/(a+jb)); it is compared exactly, not as an RCF")


def _fin_il_build(p):
    f, g, h, k, n = _g(p, "f", "g", "h", "k", "n")
    qs = []
    for j in range(n):
        qs += [f + j * h, g + j * k]
    return RegularCF(0, qs)


_spec("fin_interlaced", "finap2",
      [Param("f", I, INT_POS), Param("g", I, INT_POS), Param("h", I, INT_POS), Param("k", I, INT_POS),
       Param("n", I, INT_POS)],
      [C("2gh = k(2f+h)", lambda p: 2 * p["g"] * p["h"] == p["k"] * (2 * p["f"] + p["h"])),
       C("f, g ≥ 1", lambda p: p["f"] >= 1 and p["g"] >= 1),
       C("h, k ≥ 1", lambda p: p["h"] >= 1 and p["k"] >= 1),
       C("n ≥ 1", lambda p: p["n"] >= 1)],
      _fin_il_build, exact=lambda p: F(finap2_closed(*_g(p, "f", "g", "h", "k", "n"))))


# public operations ----------------------------------------------------------


def _normalize(spec: FamilySpec, params: dict) -> tuple[dict, list[str]]:
    problems = []
    full = dict(spec.defaults)
    full.update(params)
    out = {}
    for prm in spec.params:
        if prm.name not in full:
            problems.append(f"missing parameter {prm.name!r}")
            continue
        v = full[prm.name]
        if not prm.accepts(v):
            problems.append(f"parameter {prm.name!r} must be {prm.kind}, got {v!r}")
            continue
        if prm.kind == "integer":
            v = int(v)
        elif prm.kind == "rational":
            v = F(v)
        else:
            v = tuple(v)
        out[prm.name] = v
    extra = sorted(set(full) - set(spec.param_names))
    problems += [f"unknown parameter {x!r}" for x in extra]
    return out, problems


def validate_params(fid: str, params: dict) -> list[str]:
    """Violated constraints (as their texts); empty when the set is valid."""
    spec = get_family(fid)
    p, problems = _normalize(spec, params)
    if problems:
        return problems
    return [c.text for c in spec.constraints if not c.check(p)]


def _checked_params(fid: str, params: dict) -> tuple[FamilySpec, dict]:
    spec = get_family(fid)
    p, problems = _normalize(spec, params)
    problems = problems or [c.text for c in spec.constraints if not c.check(p)]
    if problems:
        raise InvalidParams(fid, problems)
    return spec, p


def family_cf(fid: str, params: dict) -> RegularCF | GeneralizedCF:
    """The (lazy) canonical expansion; a GeneralizedCF for fin_ap with c != 1."""
    spec, p = _checked_params(fid, params)
    return spec.build(p)


def quotients(fid: str, params: dict, n: int) -> RegularCF:
    """First n partial quotients of the canonical expansion."""
    cf = family_cf(fid, params)
    if isinstance(cf, GeneralizedCF):
        raise FamilyError("not a regular continued fraction for these parameters", family=fid)
    try:
        return cf.truncate(n)
    except FamilyError:
        raise
    except CFError as exc:
        raise FamilyError(str(exc), family=fid) from exc


def display_quotients(fid: str, params: dict, n: int) -> list[int]:
    """First n quotients of the displayed (golden) pattern."""
    spec, p = _checked_params(fid, params)
    if spec.display is None:
        raise FamilyError("no displayed pattern", family=fid)
    return spec.display(p, n)


def exact_value(fid: str, params: dict) -> Fraction:
    spec, p = _checked_params(fid, params)
    if spec.exact_value is None:
        raise FamilyError("family has no exact rational value", family=fid)
    return spec.exact_value(p)


def closed_form(fid: str, params: dict, digits: int) -> IntervalReal:
    """Certified enclosure of the closed form with width below 10**-digits."""
    spec, p = _checked_params(fid, params)
    if spec.exact_value is not None:
        x = spec.exact_value(p)
        return IntervalReal.from_fraction(x, digits)
    return _certify(lambda w: spec.value(p, w), digits, fid)


def expansion_value(fid: str, params: dict) -> Fraction:
    """Exact value of a finite family's expansion, computed from its terms."""
    cf = family_cf(fid, params)
    if isinstance(cf, GeneralizedCF):
        return F(eval_gcf(cf, len(cf.terms())))
    if not cf.is_finite:
        raise FamilyError("expansion is infinite", family=fid)
    P, Q = cf.head, 1
    p0, q0 = 1, 0
    for a in cf:
        P, p0 = a * P + p0, P
        Q, q0 = a * Q + q0, Q
    return F(P, Q)


# parameter text and grids ----------------------------------------------------


def parse_params(fid: str, text: str) -> dict:
    """Parse "k=v,k=v" with rationals written p/q and lists written 1:2:3."""
    spec = get_family(fid)
    by_name = {prm.name: prm for prm in spec.params}
    out = {}
    text = text.strip()
    if not text:
        return out
    for item in text.split(","):
        if "=" not in item:
            raise ParseError(f"--set: expected name=value, got {item.strip()!r}")
        k, v = (t.strip() for t in item.split("=", 1))
        if k not in by_name:
            raise ParseError(f"--set: unknown parameter {k!r} for {fid} (expected {', '.join(by_name)})")
        try:
            out[k] = by_name[k].parse(v)
        except ParseError as exc:
            raise ParseError(f"--set: {exc}") from None
    return out


def format_params(fid: str, params: dict) -> str:
    spec = get_family(fid)
    full = dict(spec.defaults)
    full.update(params)
    return ",".join(f"{prm.name}={prm.format(full[prm.name])}" for prm in spec.params if prm.name in full)


def _valid(fid: str, p: dict) -> bool:
    try:
        return not validate_params(fid, p)
    except CFError:
        return False


def default_grid(fid: str, n_small: int = 3, n_random: int = 2, seed: int | None = None,
                 max_attempts: int = 20_000) -> list[dict]:
    """The n_small lexicographically smallest valid tuples plus n_random random valid ones."""
    spec = get_family(fid)
    names = spec.param_names
    domains = [prm.domain for prm in spec.params]
    out: list[dict] = []
    for attempt, combo in enumerate(itertools.product(*domains)):
        if len(out) >= n_small or attempt >= max_attempts:
            break
        p = dict(zip(names, combo))
        if _valid(fid, p):
            out.append(p)
    rng = random.Random(zlib.crc32(fid.encode()) if seed is None else seed)
    seen = {tuple(sorted(p.items())) for p in out}
    picked = 0
    for _ in range(max_attempts):
        if picked >= n_random:
            break
        p = {name: rng.choice(dom) for name, dom in zip(names, domains)}
        key = tuple(sorted(p.items()))
        if key in seen or not _valid(fid, p):
            continue
        seen.add(key)
        out.append(p)
        picked += 1
    return out
