"""Certified evaluation of the series that give closed forms.

Every infinite sum is computed the same way: exact partial sums (in Q or in
a quadratic field) plus a rigorous tail bound.  If |t_{k+1}| <= rho |t_k| for
all k >= N with rho < 1, the tail from N on is at most |t_N| / (1 - rho).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable

from .errors import SeriesError
from .numerics import IntervalReal, QuadElem, quad_to_interval, tolerance
from .numerics.interval import GUARD_DIGITS

TERM_CAP = 10_000
Exact = Fraction | QuadElem


def _exact(v) -> Exact:
    if isinstance(v, (Fraction, QuadElem)):
        return v
    if isinstance(v, int):
        return Fraction(v)
    raise TypeError(f"expected an exact number, got {type(v).__name__}")


def _log10_estimate(x: Fraction) -> int:
    """Rough log10 of a positive rational, safe for huge or tiny values."""
    return math.floor((x.numerator.bit_length() - x.denominator.bit_length()) * 0.30103)


def abs_upper(v) -> Fraction:
    """A rational upper bound on |v|."""
    if isinstance(v, QuadElem) and not v.is_rational:
        # x + y sqrt(D) can be far smaller than |x| + |y| sqrt(D); refine until
        # the enclosure is tight relative to its own size
        crude = abs(v.x) + abs(v.y) * (math.isqrt(v.D) + 1)
        digits = max(12, 12 - _log10_estimate(crude))
        while True:
            iv = quad_to_interval(v, digits)
            if iv.width * 10 <= iv.abs_lower() or digits > 20_000:
                return min(crude, iv.abs_upper())
            digits *= 2
    return abs(Fraction(v.x if isinstance(v, QuadElem) else v))


def to_interval(v, digits: int) -> IntervalReal:
    if isinstance(v, IntervalReal):
        return v
    if isinstance(v, QuadElem):
        return quad_to_interval(v, digits)
    return IntervalReal.from_fraction(v, digits)


def q_pochhammer(z, q, n: int):
    """(z; q)_n = prod_{k<n} (1 - z q^k), exact."""
    z, q = _exact(z), _exact(q)
    out, qk = Fraction(1), Fraction(1)
    for _ in range(n):
        out = out * (1 - z * qk)
        qk = qk * q
    return out


@dataclass(frozen=True)
class SeriesSum:
    partial: Exact
    tail: Fraction
    terms: int

    def interval(self, digits: int) -> IntervalReal:
        core = to_interval(self.partial, digits)
        return IntervalReal(core.lo - self.tail, core.hi + self.tail, core.prec,
                            exact=core.exact if self.tail == 0 else None)


def sum_series(first: Exact, factor: Callable[[int], Exact], bound: Callable[[int], Fraction | None],
               tol: Fraction, cap: int = TERM_CAP) -> SeriesSum:
    """Sum t_0 = first, t_{n+1} = t_n * factor(n) to within ``tol``.

    ``bound(n)`` must return a rational rho with |factor(k)| <= rho for every
    k >= n, or None when no useful bound is known yet.
    """
    total, t = Fraction(0), _exact(first)
    for n in range(cap):
        if not t:
            return SeriesSum(total, Fraction(0), n)
        rho = bound(n)
        if rho is not None and rho < 1:
            tail = abs_upper(t) / (1 - rho)
            if tail <= tol:
                return SeriesSum(total, tail, n)
        total = total + t
        t = t * factor(n)
    raise SeriesError(f"tail bound not reached within {cap} terms")


def _one_minus(x: Fraction) -> Fraction | None:
    return 1 - x if x < 1 else None


def _ratio(num: Fraction, *dens: Fraction | None) -> Fraction | None:
    out = num
    for d in dens:
        if d is None or d <= 0:
            return None
        out /= d
    return out


# Tasoevian double-Pochhammer sums -----------------------------------------


@dataclass(frozen=True)
class TasoevSumParams:
    """Sum over n >= 0 of beta^n q^(n(n+shift)/2) / ((q;q)_n (gamma;q)_n), shift in {1, 3}."""

    beta: Exact
    gamma: Exact
    q: Fraction
    shift: int = 1

    def __post_init__(self):
        if self.shift not in (1, 3):
            raise ValueError("shift must be 1 or 3")
        if not abs(Fraction(self.q)) < 1:
            raise ValueError("|q| must be below 1")


def tasoev_partial(p: TasoevSumParams, N: int) -> Exact:
    """Exact sum of the first N terms."""
    total, t = Fraction(0), Fraction(1)
    h = (1 + p.shift) // 2
    for n in range(N):
        total = total + t
        t = t * _tasoev_factor(p, n, h)
    return total


def _tasoev_factor(p: TasoevSumParams, n: int, h: int) -> Exact:
    q = Fraction(p.q)
    den = (1 - q ** (n + 1)) * (1 - p.gamma * q**n)
    if not den:
        raise SeriesError(f"Pochhammer factor vanishes at n = {n}")
    return p.beta * q ** (n + h) / den


def tasoev_sum(p: TasoevSumParams, digits: int, guard: int = GUARD_DIGITS) -> IntervalReal:
    q = Fraction(p.q)
    aq, ab, ag = abs(q), abs_upper(p.beta), abs_upper(p.gamma)
    h = (1 + p.shift) // 2

    def bound(n):
        return _ratio(ab * aq ** (n + h), _one_minus(aq ** (n + 1)), _one_minus(ag * aq**n))

    s = sum_series(Fraction(1), lambda n: _tasoev_factor(p, n, h), bound, tolerance(digits + guard))
    return s.interval(digits + guard).with_producer(lambda d: tasoev_sum(p, d, guard))


# H1 ratio ------------------------------------------------------------------


def _h1_sum(a, b, c, d, q: Fraction, k: int, tol: Fraction) -> SeriesSum:
    """Sum over j of prod_{i<j}(b/d + c q^i/d^2) q^(j(j+1)/2 + (k-1)j) / ((q;q)_j (-a q^k/d; q)_j).

    k = 1 gives the denominator series and k = 2 the numerator series, whose
    extra leading factor q is applied by the caller.  Writing the product as
    b/d + c q^i/d^2 instead of (b/d)(1 + c q^i/(bd)) keeps b = 0 legal.
    """
    bd, cd2, ad = b / d, c / (d * d), a / d
    aq = abs(q)
    ubd, ucd2, uad = abs_upper(bd), abs_upper(cd2), abs_upper(ad)

    def factor(j):
        den = (1 - q ** (j + 1)) * (1 + ad * q ** (j + k))
        if not den:
            raise SeriesError(f"Pochhammer factor vanishes at j = {j}")
        return (bd + cd2 * q**j) * q ** (j + k) / den

    def bound(j):
        return _ratio((ubd + ucd2 * aq**j) * aq ** (j + k), _one_minus(aq ** (j + 1)), _one_minus(uad * aq ** (j + k)))

    return sum_series(Fraction(1), factor, bound, tol)


def h1_ratio(a, b, c, d, q, digits: int, guard: int = GUARD_DIGITS, cap: int = 8) -> IntervalReal:
    """Right side of the closed form for 1/H1(a,b,c,d,q) - 1.

    H1 = 1/(1 + (c - abq)/((a+b)q + d + ...)); the value is
    (c - abq)/((d + aq) q) times a ratio of two basic hypergeometric sums.
    """
    a, b, c, d, q = (_exact(x) for x in (a, b, c, d, q))
    q = Fraction(q)
    if d == 0:
        raise ValueError("d must be nonzero")
    if not abs(q) < 1:
        raise ValueError("|q| must be below 1")
    pre_num = c - a * b * q
    if not pre_num:
        return IntervalReal.from_fraction(0, digits)
    pre_den = (d + a * q) * q
    if not pre_den:
        raise SeriesError("prefactor denominator d + aq vanishes")
    pre = pre_num / pre_den
    work = digits + guard
    for _ in range(cap):
        tol = tolerance(work)
        num = _h1_sum(a, b, c, d, q, 2, tol).interval(work) * q
        den = _h1_sum(a, b, c, d, q, 1, tol).interval(work)
        if not den.contains_zero():
            scale = to_interval(pre, work)
            ratio = num / den
            out = scale * ratio
            if out.is_tight(digits):
                return out.with_producer(lambda dd: h1_ratio(a, b, c, d, q, dd, guard))
        work *= 2
    raise SeriesError("denominator series could not be separated from zero")


# Bessel-type ratios ------------------------------------------------------


@dataclass(frozen=True)
class BesselRatioParams:
    """scale * (z/2) * S1/S0 with S1 = sum w^k/(k! (nu)_{k+1}), S0 = sum w^k/(k! (nu)_k).

    z = z_num / sqrt(z_rad) and w = (z/2)^2, so S1/S0 * (z/2) is the ratio
    I_nu(z) / I_{nu-1}(z) written with rising factorials.
    """

    nu: Fraction
    z_num: Fraction
    z_rad: int = 1
    scale: Exact = Fraction(1)

    def __post_init__(self):
        if self.z_rad <= 0:
            raise ValueError("radicand must be positive")

    @classmethod
    def lehmer(cls, a, b, u=1, v=1) -> "BesselRatioParams":
        """[0; ua, v(a+b), u(a+2b), ...] = scale * (z/2) * S1/S0 with nu = a/b, z = 2/(b sqrt(uv))."""
        a, b, u, v = (Fraction(x) for x in (a, b, u, v))
        uv = u * v
        if uv.denominator != 1:
            raise ValueError("uv must be an integer")
        return cls(a / b, 2 / b, int(uv), QuadElem.sqrt(v / u))

    @classmethod
    def interlaced(cls, a, b, d) -> "BesselRatioParams":
        """[0; a, c, a+b, c+d, ...] under 2bc = d(2a+b): nu = 2a/b, z = 4/sqrt(bd), scale sqrt(d/b)."""
        a, b, d = (Fraction(x) for x in (a, b, d))
        bd = b * d
        if bd.denominator != 1 or bd <= 0:
            raise ValueError("bd must be a positive integer")
        return cls(2 * a / b, Fraction(4), int(bd), QuadElem.sqrt(d / b))

    @property
    def w(self) -> Fraction:
        return Fraction(self.z_num) ** 2 / (4 * self.z_rad)

    @property
    def prefactor(self) -> Exact:
        half_z = QuadElem(0, Fraction(self.z_num) / (2 * self.z_rad), self.z_rad)
        out = self.scale * half_z
        return out.to_fraction() if isinstance(out, QuadElem) and out.is_rational else out


def bessel_type_ratio(p: BesselRatioParams, digits: int, guard: int = GUARD_DIGITS) -> IntervalReal:
    nu, w = Fraction(p.nu), p.w
    if nu.denominator == 1 and nu <= 0:
        raise SeriesError(f"rising factorial of {nu} vanishes")
    aw = abs(w)
    work = digits + guard
    tol = tolerance(work)

    def s0_bound(n):
        return aw / ((n + 1) * (nu + n)) if nu + n > 0 else None

    def s1_bound(n):
        return aw / ((n + 1) * (nu + n + 1)) if nu + n + 1 > 0 else None

    s1 = sum_series(1 / nu, lambda k: w / ((k + 1) * (nu + k + 1)), s1_bound, tol)
    s0 = sum_series(Fraction(1), lambda k: w / ((k + 1) * (nu + k)), s0_bound, tol)
    den = s0.interval(work)
    if den.contains_zero():
        raise SeriesError("denominator series encloses zero")
    out = to_interval(p.prefactor, work) * s1.interval(work) / den
    return out.with_producer(lambda d: bessel_type_ratio(p, d, guard))


# Elementary functions at surd arguments -------------------------------------


def _split_arg(arg) -> tuple[Exact, Fraction]:
    """Return (x, x^2) for a rational or pure-surd argument."""
    if isinstance(arg, tuple):
        num, rad = arg
        arg = QuadElem(0, Fraction(num) / rad, int(rad))
    x = _exact(arg)
    if isinstance(x, QuadElem):
        if x.is_rational:
            x = x.x
        elif x.x != 0:
            raise ValueError("argument must be rational or a pure surd y*sqrt(D)")
    sq = x * x
    return x, (sq.to_fraction() if isinstance(sq, QuadElem) else sq)


def _even_odd_sums(s: Fraction, sign: int, tol: Fraction) -> tuple[SeriesSum, SeriesSum]:
    """Sums of (sign*s)^j/(2j+1)! and (sign*s)^j/(2j)!."""
    r = sign * s
    odd = sum_series(Fraction(1), lambda j: r / ((2 * j + 2) * (2 * j + 3)), lambda j: abs(s) / ((2 * j + 2) * (2 * j + 3)), tol)
    even = sum_series(Fraction(1), lambda j: r / ((2 * j + 1) * (2 * j + 2)), lambda j: abs(s) / ((2 * j + 1) * (2 * j + 2)), tol)
    return odd, even


def elementary_interval(fn: str, arg, digits: int, guard: int = GUARD_DIGITS) -> IntervalReal:
    """Enclosure of exp, tan or tanh at a rational or y*sqrt(D) argument."""
    if fn not in ("exp", "tan", "tanh"):
        raise ValueError(f"unknown function {fn!r}")
    x, s = _split_arg(arg)
    work = digits + guard
    tol = tolerance(work)
    producer = lambda d: elementary_interval(fn, arg, d, guard)  # noqa: E731
    if not x:
        return IntervalReal.from_fraction(1 if fn == "exp" else 0, digits).with_producer(producer)
    xi = to_interval(x, work)
    if fn == "exp":
        if isinstance(x, Fraction):
            ax = abs(x)
            series = sum_series(Fraction(1), lambda n: x / (n + 1),
                                lambda n: ax / (n + 1) if n + 1 > ax else None, tol)
            return series.interval(work).with_producer(producer)
        odd, even = _even_odd_sums(s, 1, tol)
        return (even.interval(work) + xi * odd.interval(work)).with_producer(producer)
    odd, even = _even_odd_sums(s, -1 if fn == "tan" else 1, tol)
    den = even.interval(work)
    if den.contains_zero():
        raise SeriesError("argument too close to a pole")
    return (xi * odd.interval(work) / den).with_producer(producer)


# Finite continued fractions with arithmetic-progression quotients --------


def _prod(lo: int, hi: int, f: Callable[[int], Fraction]) -> Fraction:
    out = Fraction(1)
    for j in range(lo, hi + 1):
        out *= f(j)
    return out


def finite_ap_closed(a, b, c, n: int) -> tuple[Fraction, Fraction]:
    """Numerator and denominator of -c/a - c/(a+b) - ... - c/(a+(n-1)b)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    term = lambda j: a + j * b  # noqa: E731
    P = sum((comb(n - i, i - 1) * (-c) ** i * _prod(i, n - i, term) for i in range(1, (n + 1) // 2 + 1)), Fraction(0))
    Q = sum((comb(n - i, i) * (-c) ** i * _prod(i, n - 1 - i, term) for i in range(0, n // 2 + 1)), Fraction(0))
    return P, Q


def finap2_closed(f, g, h, k, n: int) -> Fraction:
    """Value of [0; f, g, f+h, g+k, ..., f+(n-1)h, g+(n-1)k] when 2gh = k(2f+h)."""
    f, g, h, k = (Fraction(x) for x in (f, g, h, k))
    residual = 2 * g * h - k * (2 * f + h)
    if residual:
        raise ValueError(f"constraint 2gh = k(2f+h) fails: residual {residual}")
    if 2 * f + h == 0:
        raise ValueError("2f + h must be nonzero")
    if n < 1:
        raise ValueError("n must be at least 1")
    r = 2 * g / (2 * f + h)
    term = lambda j: f + j * h / 2  # noqa: E731
    num = sum((comb(2 * n - i, i - 1) * r ** (2 * n - i) * _prod(i, 2 * n - i, term) for i in range(1, n + 1)), Fraction(0))
    den = sum((comb(2 * n - i, i) * r ** (2 * n - 1 - i) * _prod(i, 2 * n - 1 - i, term) for i in range(0, n + 1)), Fraction(0))
    if den == 0:
        raise ZeroDivisionError("closed-form denominator vanishes")
    return num / den
