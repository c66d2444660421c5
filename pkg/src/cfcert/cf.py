"""Regular and generalized continued fractions.

Quotient sources are either finite sequences or zero-argument factories that
return a fresh iterator each time they are called.  Both CF types cache the
terms they have pulled, so a lazily generated expansion is computed once and
can be shared.
"""

from __future__ import annotations

import math
import re
import threading
from dataclasses import dataclass
from fractions import Fraction
from itertools import count, islice
from typing import Callable, Iterable, Iterator, Sequence

from .errors import CFExhausted, ParseError, PrecisionCapExceeded, RegularizationError, ZeroDenominator
from .numerics import IntervalReal, QuadElem, bits_for_digits, interval_refine, parse_rational, tolerance
from .numerics.rational import format_rational

Source = Sequence | Callable[[], Iterator]


class _Cached:
    """Thread-safe memo over a (possibly infinite) term source."""

    def __init__(self, source: Source):
        if callable(source):
            self._factory = source
            self._items: list = []
            self._it: Iterator | None = None
            self._done = False
        else:
            self._factory = None
            self._items = list(source)
            self._it = None
            self._done = True
        self._lock = threading.Lock()

    @property
    def finite(self) -> bool:
        return self._factory is None

    def fill(self, n: int) -> list:
        if n <= len(self._items) or self._done:
            return self._items[:n]
        with self._lock:
            if self._it is None:
                self._it = iter(self._factory())
            while len(self._items) < n:
                try:
                    self._items.append(next(self._it))
                except StopIteration:
                    self._done = True
                    break
        return self._items[:n]

    def get(self, i: int):
        """0-based item or None past the end."""
        items = self.fill(i + 1)
        return items[i] if i < len(items) else None

    def __iter__(self):
        for i in count():
            item = self.get(i)
            if item is None:
                return
            yield item


class RegularCF:
    """[head; a1, a2, ...] with integer quotients.

    Canonical expansions have every a_n >= 1; signed or zero quotients are
    tolerated so that :func:`regularize` has something to work on.
    ``truncated`` marks a finite prefix cut from a longer expansion.
    """

    def __init__(self, head: int, quotients: Source = (), *, truncated: bool = False):
        self.head = int(head)
        self._q = _Cached(quotients)
        self.truncated = truncated

    @classmethod
    def from_function(cls, head: int, fn: Callable[[int], int]) -> "RegularCF":
        """Infinite expansion whose n-th quotient (n >= 1) is ``fn(n)``."""
        return cls(head, lambda: (fn(n) for n in count(1)))

    @classmethod
    def from_list(cls, items: Sequence[int]) -> "RegularCF":
        if not items:
            raise ValueError("a continued fraction needs at least a head term")
        return cls(items[0], list(items[1:]))

    @property
    def is_finite(self) -> bool:
        """True when the quotient source is a finite sequence."""
        return self._q.finite

    def prefix(self, n: int) -> list[int]:
        return self._q.fill(n)

    def quotient(self, i: int) -> int | None:
        """The i-th partial quotient, 1-based; None past the end."""
        if i == 0:
            return self.head
        return self._q.get(i - 1)

    def __iter__(self) -> Iterator[int]:
        return iter(self._q)

    def terms(self) -> list[int]:
        if not self.is_finite:
            raise ValueError("cannot list an infinite expansion")
        return self._q.fill(len(self._q._items))

    def truncate(self, n: int) -> "RegularCF":
        q = self.prefix(n + 1)
        return RegularCF(self.head, q[:n], truncated=len(q) > n)

    def to_gcf(self) -> "GeneralizedCF":
        if self.is_finite:
            return GeneralizedCF(self.head, [(1, a) for a in self.terms()], truncated=self.truncated)
        return GeneralizedCF(self.head, lambda: ((1, a) for a in self))

    def literal(self, n: int | None = None) -> str:
        """CF literal; infinite or cut expansions get a trailing ``~``."""
        if n is None:
            if not self.is_finite:
                raise ValueError("give a term count for an infinite expansion")
            body, more = self.terms(), self.truncated
        else:
            got = self.prefix(n + 1)
            body, more = got[:n], len(got) > n or (self.truncated and len(got) <= n)
        return format_rcf(self.head, body, truncated=more)

    def __eq__(self, other):
        if not isinstance(other, RegularCF) or not (self.is_finite and other.is_finite):
            return NotImplemented
        return self.head == other.head and self.terms() == other.terms() and self.truncated == other.truncated

    def __repr__(self):
        if self.is_finite:
            return f"RegularCF({self.literal()})"
        return f"RegularCF({self.literal(8)})"


class GeneralizedCF:
    """b0 + a1/(b1 + a2/(b2 + ...)) with exact (Fraction or QuadElem) terms."""

    def __init__(self, b0, terms: Source = (), *, truncated: bool = False):
        self.b0 = _exact(b0)
        self._t = _Cached(terms)
        self.truncated = truncated

    @classmethod
    def from_functions(cls, b0, a_fn: Callable[[int], object], b_fn: Callable[[int], object]) -> "GeneralizedCF":
        return cls(b0, lambda: ((a_fn(n), b_fn(n)) for n in count(1)))

    @property
    def is_finite(self) -> bool:
        return self._t.finite

    def terms(self, n: int | None = None) -> list[tuple]:
        """First n (a_k, b_k) pairs; all of them when n is None (finite only)."""
        if n is None:
            if not self.is_finite:
                raise ValueError("cannot list an infinite fraction")
            n = len(self._t._items)
        return [(_exact(a), _exact(b)) for a, b in self._t.fill(n)]

    def term(self, k: int):
        """The k-th pair, 1-based; None past the end."""
        t = self._t.get(k - 1)
        return None if t is None else (_exact(t[0]), _exact(t[1]))

    def __iter__(self):
        for a, b in self._t:
            yield _exact(a), _exact(b)

    def truncate(self, n: int) -> "GeneralizedCF":
        t = self._t.fill(n + 1)
        return GeneralizedCF(self.b0, t[:n], truncated=len(t) > n)

    def literal(self, n: int | None = None) -> str:
        if n is None:
            body, more = self.terms(), self.truncated
        else:
            got = self._t.fill(n + 1)
            body, more = [(_exact(a), _exact(b)) for a, b in got[:n]], len(got) > n
        return format_gcf(self.b0, body, truncated=more)

    def __repr__(self):
        return f"GeneralizedCF({self.literal(None if self.is_finite else 6)})"


def _exact(v):
    if isinstance(v, (Fraction, QuadElem)):
        return v
    if isinstance(v, int):
        return Fraction(v)
    raise TypeError(f"continued fraction terms must be exact, got {type(v).__name__}")


@dataclass(frozen=True)
class Convergent:
    P: object
    Q: object

    @property
    def value(self):
        if self.Q == 0:
            raise ZeroDenominator("convergent with zero denominator")
        if isinstance(self.P, int) and isinstance(self.Q, int):
            return Fraction(self.P, self.Q)
        return self.P / self.Q

    def __iter__(self):
        return iter((self.P, self.Q))


# evaluation -----------------------------------------------------------------


def convergents(cf: RegularCF, n: int) -> list[Convergent]:
    """P_0/Q_0 ... P_n/Q_n by the three-term recurrence."""
    if n < 0:
        raise ValueError("n must be non-negative")
    qs = cf.prefix(n)
    if len(qs) < n:
        raise CFExhausted(f"expansion has only {len(qs)} quotients, {n} requested")
    p0, p1, q0, q1 = 1, cf.head, 0, 1
    out = [Convergent(p1, q1)]
    for a in qs:
        p0, p1 = p1, a * p1 + p0
        q0, q1 = q1, a * q1 + q0
        out.append(Convergent(p1, q1))
    return out


def signed_value(items: Sequence[int]) -> tuple[int, int]:
    """Projective value (P, Q) of [items[0]; items[1], ...] with arbitrary integer entries."""
    p0, p1, q0, q1 = 1, items[0], 0, 1
    for a in items[1:]:
        p0, p1 = p1, a * p1 + p0
        q0, q1 = q1, a * q1 + q0
    return p1, q1


def gcf_approximants(gcf: GeneralizedCF, n: int) -> list[tuple]:
    """Canonical numerators and denominators (A_k, B_k) for k = 0..n."""
    terms = gcf.terms(n)
    if len(terms) < n:
        raise CFExhausted(f"fraction has only {len(terms)} terms, {n} requested")
    A0, A1, B0, B1 = Fraction(1), gcf.b0, Fraction(0), Fraction(1)
    out = [(A1, B1)]
    for a, b in terms:
        A0, A1 = A1, b * A1 + a * A0
        B0, B1 = B1, b * B1 + a * B0
        out.append((A1, B1))
    return out


def eval_gcf(gcf: GeneralizedCF, n: int):
    """Exact n-th approximant A_n / B_n."""
    A, B = gcf_approximants(gcf, n)[-1]
    if B == 0:
        raise ZeroDenominator(f"B_{n} = 0", index=n)
    return A / B


def equivalence_transform(gcf: GeneralizedCF, scales) -> GeneralizedCF:
    """Rescale a_n -> c_n c_{n-1} a_n and b_n -> c_n b_n (c_0 = 1).

    ``scales`` is a sequence c_1, c_2, ... or a callable n -> c_n.  A finite
    sequence shorter than the fraction leaves the remaining terms at scale 1.
    """
    if callable(scales):
        scale = scales
    else:
        seq = [_exact(c) for c in scales]
        scale = lambda n: seq[n - 1] if n <= len(seq) else Fraction(1)  # noqa: E731

    def gen():
        prev = Fraction(1)
        for n, (a, b) in enumerate(gcf, 1):
            c = _exact(scale(n))
            if c == 0:
                raise ValueError(f"zero scale factor at index {n}")
            yield c * prev * a, c * b
            prev = c

    if gcf.is_finite:
        return GeneralizedCF(gcf.b0, list(gen()), truncated=gcf.truncated)
    return GeneralizedCF(gcf.b0, gen)


# regularization -------------------------------------------------------------

_LOOKAHEAD = 8


class _Regularizer:
    """Left-to-right rewriting with the zero rule [.., m, 0, p, ..] = [.., m+p, ..]
    and the negative rule [.., m, -n, rest] = [.., m-1, 1, n-1, -rest].

    The negation of the rest is tracked as a running sign applied to incoming
    terms.  ``frozen`` counts output terms already handed to a consumer; a
    rewrite that would touch them is an error.
    """

    def __init__(self):
        self.out: list[int] = []
        self.frozen = 0
        self.pending_zero = False
        self.sign = 1
        self.consumed = 0
        self.rewrites = 0

    def _pop(self) -> int:
        if len(self.out) <= self.frozen:
            raise RegularizationError("rewrite reached a quotient that was already emitted")
        self.rewrites += 1
        if self.rewrites > 10 * (self.consumed + len(self.out)) + 10:
            raise RegularizationError("rewrite budget exhausted (possible cycle)")
        return self.out.pop()

    def _push(self, x: int) -> None:
        while True:
            if not self.out:
                self.out.append(x)
                return
            if self.pending_zero:
                self.pending_zero = False
                x = self._pop() + x
                continue
            if x == 0:
                self.pending_zero = True
                return
            if x < 0:
                m = self._pop()
                self._push(m - 1)
                self._push(1)
                self.sign = -self.sign
                x = -x - 1
                continue
            self.out.append(x)
            return

    def feed(self, x: int) -> None:
        self.consumed += 1
        self._push(self.sign * int(x))

    def ready(self) -> bool:
        return len(self.out) - self.frozen > _LOOKAHEAD

    def emit(self) -> int:
        v = self.out[self.frozen]
        self.frozen += 1
        return v

    def finish(self) -> None:
        if self.pending_zero:
            if len(self.out) <= 1:
                raise RegularizationError("value is infinite (trailing zero after the head)")
            self.pending_zero = False
            self._pop()
        if len(self.out) >= 2 and self.out[-1] == 1:
            self._pop()
            self.out[-1] += 1

    def drain(self) -> Iterator[int]:
        while self.frozen < len(self.out):
            yield self.emit()


def _regularized_stream(source: Callable[[], Iterable[int]]) -> Callable[[], Iterator[int]]:
    def gen():
        r = _Regularizer()
        for x in source():
            r.feed(x)
            while r.ready():
                yield r.emit()
        r.finish()
        yield from r.drain()

    return gen


def regularize(cf: RegularCF | Sequence[int]) -> RegularCF:
    """Rewrite a signed expansion into canonical form with the same value.

    Finite inputs are checked exactly: the projective values of input and
    output must agree.  Infinite inputs are rewritten lazily.
    """
    if not isinstance(cf, RegularCF):
        cf = RegularCF.from_list(list(cf))
    if cf.is_finite:
        items = [cf.head] + cf.terms()
        P, Q = signed_value(items)
        if Q == 0:
            raise RegularizationError("input value is undefined (zero denominator)")
        r = _Regularizer()
        for x in items:
            r.feed(x)
        r.finish()
        out = r.out
        P2, Q2 = signed_value(out)
        if P * Q2 != P2 * Q:
            raise RegularizationError(f"value changed: {items} -> {out}")
        if any(a < 1 for a in out[1:]):
            raise RegularizationError(f"non-canonical output {out}")
        return RegularCF(out[0], out[1:], truncated=cf.truncated)

    stream = _regularized_stream(lambda: _with_head(cf))
    first = next(stream())
    return RegularCF(first, lambda: islice(stream(), 1, None))


def _with_head(cf: RegularCF) -> Iterator[int]:
    yield cf.head
    yield from cf


# certified evaluation -------------------------------------------------------


@dataclass(frozen=True)
class CFEnclosure:
    interval: IntervalReal
    terms_used: int
    exact: bool


def cf_enclosure(cf: RegularCF, digits: int, max_terms: int | None = None) -> CFEnclosure:
    """Enclose a canonical RCF between consecutive convergents.

    Stops once the two latest convergents are closer than 10**-digits.  When
    ``max_terms`` quotients have been consumed first, the best available
    bracket is returned (wider than requested); a finite expansion that ends
    yields its exact value.
    """
    tol = tolerance(digits)
    prec = bits_for_digits(digits + 1)
    producer = lambda d: certified_value(cf, d)  # noqa: E731
    p0, p1, q0, q1 = 1, cf.head, 0, 1
    k = 0
    while True:
        if max_terms is not None and k >= max_terms:
            if cf.quotient(k + 1) is None:
                break
            lo, hi = sorted((Fraction(p0, q0), Fraction(p1, q1))) if q0 else (Fraction(p1, q1) - 1, Fraction(p1, q1) + 1)
            return CFEnclosure(IntervalReal(lo, hi, prec, producer=producer), k, False)
        a = cf.quotient(k + 1)
        if a is None:
            break
        if a < 1:
            raise ValueError(f"non-canonical quotient {a} at index {k + 1}; regularize first")
        p0, p1 = p1, a * p1 + p0
        q0, q1 = q1, a * q1 + q0
        k += 1
        if Fraction(1, q0 * q1) < tol / 2 and cf.quotient(k + 1) is not None:
            lo, hi = sorted((Fraction(p0, q0), Fraction(p1, q1)))
            return CFEnclosure(IntervalReal(lo, hi, prec, producer=producer), k, False)
    x = Fraction(p1, q1)
    return CFEnclosure(IntervalReal(x, x, prec, exact=x, producer=producer), k, True)


def certified_value(cf: RegularCF, digits: int) -> IntervalReal:
    """Enclosure of the value of a canonical RCF with width below 10**-digits."""
    enc = cf_enclosure(cf, digits)
    if enc.interval.exact is None and not enc.interval.is_tight(digits):
        raise CFExhausted("expansion ended before the target width")
    return enc.interval


@dataclass
class RCFExpansion:
    """Result of :func:`rcf_expand`: certified quotients [a0, a1, ...]."""

    quotients: list[int]
    terminated: bool
    uncertified_at: int | None = None

    @property
    def head(self) -> int:
        return self.quotients[0]

    def as_cf(self) -> RegularCF:
        return RegularCF(self.quotients[0], self.quotients[1:], truncated=not self.terminated)

    def literal(self) -> str:
        return format_rcf(self.quotients[0], self.quotients[1:])


def _euclid(x: Fraction, max_terms: int) -> RCFExpansion:
    out = []
    while len(out) <= max_terms:
        a = math.floor(x)
        out.append(a)
        x -= a
        if x == 0:
            return RCFExpansion(out, True)
        x = 1 / x
    return RCFExpansion(out, False)


def _digits_of(width: Fraction) -> int:
    if width <= 0:
        return 10**6
    return max(0, -math.floor((width.numerator.bit_length() - width.denominator.bit_length()) * 0.30103))


def rcf_expand(x: IntervalReal, max_terms: int, cap: int = 16) -> RCFExpansion:
    """Certified regular CF quotients a0, a1, ..., a_max_terms of the number in ``x``.

    The tail t_k = (p x + q) / (r x + s) is tracked by an integer matrix; a
    quotient is emitted only when the image of the whole enclosure lies in
    [a, a+1).  Otherwise ``x`` is recomputed at higher precision; after
    ``cap`` escalations the index is reported in ``uncertified_at``.
    """
    if x.exact is not None:
        return _euclid(x.exact, max_terms)
    p, q, r, s = 1, 0, 0, 1
    out: list[int] = []
    escalations = 0
    while len(out) <= max_terms:
        den_lo, den_hi = r * x.lo + s, r * x.hi + s
        ok = (den_lo > 0 and den_hi > 0) or (den_lo < 0 and den_hi < 0)
        if ok:
            t1, t2 = (p * x.lo + q) / den_lo, (p * x.hi + q) / den_hi
            lo, hi = min(t1, t2), max(t1, t2)
            a = math.floor(lo)
            if hi < a + 1 and not (out and a < 1):
                out.append(a)
                # t_{k+1} = 1 / (t_k - a)
                p, q, r, s = r, s, p - a * r, q - a * s
                continue
        if escalations >= cap:
            return RCFExpansion(out, False, uncertified_at=len(out))
        escalations += 1
        target = 2 * _digits_of(x.width) + 10
        try:
            x = interval_refine(x, target, cap=2)
        except PrecisionCapExceeded:
            return RCFExpansion(out, False, uncertified_at=len(out))
        if x.exact is not None:
            # the producer revealed a rational value: finish by Euclid on the tail
            t = (p * x.exact + q) / (r * x.exact + s)
            rest = _euclid(t, max_terms - len(out))
            return RCFExpansion(out + rest.quotients, rest.terminated)
    return RCFExpansion(out, False)


# literals -------------------------------------------------------------------


def format_rcf(head: int, quotients: Sequence[int], truncated: bool = False) -> str:
    tail = ", ".join(str(a) for a in quotients)
    mark = "~" if truncated else ""
    return f"[{head}; {tail}{mark}]" if quotients else f"[{head};{mark}]"


def format_gcf(b0, terms: Sequence[tuple], truncated: bool = False) -> str:
    def fmt(v):
        return format_rational(v) if isinstance(v, Fraction) else f"({v})"

    body = ", ".join(f"{fmt(a)}:{fmt(b)}" for a, b in terms)
    mark = "~" if truncated else ""
    return f"{{{fmt(b0)}; {body}{mark}}}" if terms else f"{{{fmt(b0)};{mark}}}"


_ELLIPSIS = re.compile(r"(\.\.\.|…)")


def _split_literal(text: str, open_: str, close: str) -> tuple[str, list[str], bool]:
    s = text.strip()
    if not (s.startswith(open_) and s.rstrip("~").rstrip().endswith(close)):
        raise ParseError(f"expected a literal of the form {open_}...{close}: {text!r}")
    truncated = s.endswith("~")
    s = s.rstrip("~").rstrip()[1:-1].strip()
    s = _ELLIPSIS.sub("~", s)
    if s.endswith("~"):
        truncated = True
        s = s[:-1].rstrip().rstrip(",")
    if ";" in s:
        head, _, rest = s.partition(";")
    else:
        head, _, rest = s.partition(",")
    items = [t.strip() for t in rest.split(",") if t.strip()]
    if not head.strip():
        raise ParseError(f"missing head term in {text!r}")
    return head.strip(), items, truncated


def parse_rcf(text: str) -> RegularCF:
    """Parse ``[a0; a1, a2, ...]`` or ``[a0, a1, ...]``; a ``~`` marks truncation."""
    head, items, truncated = _split_literal(text, "[", "]")
    try:
        return RegularCF(int(head), [int(t) for t in items], truncated=truncated)
    except ValueError as exc:
        raise ParseError(f"non-integer quotient in {text!r}") from exc


def parse_gcf(text: str) -> GeneralizedCF:
    """Parse ``{b0; a1:b1, a2:b2, ...}`` with rational entries."""
    head, items, truncated = _split_literal(text, "{", "}")
    terms = []
    for t in items:
        a, sep, b = t.partition(":")
        if not sep:
            raise ParseError(f"term {t!r} is not of the form a:b")
        terms.append((parse_rational(a), parse_rational(b)))
    return GeneralizedCF(parse_rational(head), terms, truncated=truncated)


def parse_cf_literal(text: str) -> RegularCF | GeneralizedCF:
    s = text.strip()
    if s.startswith("{"):
        return parse_gcf(s)
    return parse_rcf(s)
