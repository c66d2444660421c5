"""Exact arithmetic in real quadratic fields Q(sqrt D)."""

from __future__ import annotations

import math
import random
from fractions import Fraction
from functools import lru_cache

from ..errors import RadicandMismatch

_TRIAL_LIMIT = 10**6
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def _is_probable_prime(n: int) -> bool:
    # the fixed bases are deterministic below 3.3e24, far beyond anything we factor
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    """Return a nontrivial factor of the composite odd n (Brent's cycle finding)."""
    rng = random.Random(n)
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def _factor_large(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if _is_probable_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    r = math.isqrt(n)
    if r * r == n:
        for p, e in factorize(r).items():
            out[p] = out.get(p, 0) + 2 * e
        return
    f = _pollard_rho(n)
    _factor_large(f, out)
    _factor_large(n // f, out)


@lru_cache(maxsize=4096)
def _factor_cached(n: int) -> tuple[tuple[int, int], ...]:
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    p = 5
    while p <= _TRIAL_LIMIT and p * p <= n:
        for q in (p, p + 2):
            while n % q == 0:
                out[q] = out.get(q, 0) + 1
                n //= q
        p += 6
    if n > 1:
        if n < _TRIAL_LIMIT * _TRIAL_LIMIT or p * p > n:
            out[n] = out.get(n, 0) + 1
        else:
            _factor_large(n, out)
    return tuple(sorted(out.items()))


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of a positive integer."""
    if n < 1:
        raise ValueError("factorize expects a positive integer")
    return dict(_factor_cached(n))


def squarefree_decompose(n: int) -> tuple[int, int]:
    """Write n = s**2 * d with s >= 1 and d square-free (d keeps the sign of n)."""
    if n == 0:
        return 0, 0
    s, d = 1, 1
    for p, e in factorize(abs(n)).items():
        s *= p ** (e // 2)
        if e % 2:
            d *= p
    return s, (d if n > 0 else -d)


def _coerce(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    raise TypeError(f"unsupported coordinate type {type(v).__name__}")


class QuadElem:
    """The number x + y*sqrt(D) with rational x, y and square-free D.

    The constructor accepts any nonzero integer radicand and moves square
    factors into ``y``.  When the radicand is a perfect square the element
    collapses to the rational form (y = 0, D = 1).
    """

    __slots__ = ("x", "y", "D")

    def __init__(self, x=0, y=0, D: int = 1):
        x, y = _coerce(x), _coerce(y)
        if not isinstance(D, int):
            raise TypeError("radicand must be an integer")
        if D == 0:
            y, D = Fraction(0), 1
        else:
            s, d = squarefree_decompose(D)
            y *= s
            D = d
        if D == 1:
            x, y = x + y, Fraction(0)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "D", D)

    def __setattr__(self, name, value):
        raise AttributeError("QuadElem is immutable")

    @classmethod
    def sqrt(cls, r) -> "QuadElem":
        """sqrt(r) for a rational r, as an element of Q(sqrt(num*den))."""
        r = _coerce(r)
        # sqrt(p/q) = sqrt(p*q)/q
        return cls(0, Fraction(1, r.denominator), r.numerator * r.denominator)

    def _same_field(self, other: "QuadElem") -> int:
        if self.D == other.D or other.D == 1:
            return self.D
        if self.D == 1:
            return other.D
        raise RadicandMismatch(f"radicands differ: {self.D} vs {other.D}")

    @staticmethod
    def _lift(v):
        if isinstance(v, QuadElem):
            return v
        if isinstance(v, (int, Fraction)):
            return QuadElem(v)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        D = self._same_field(o)
        return QuadElem(self.x + o.x, self.y + o.y, D)

    __radd__ = __add__

    def __neg__(self):
        return QuadElem(-self.x, -self.y, self.D)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        D = self._same_field(o)
        return QuadElem(self.x * o.x + self.y * o.y * D, self.x * o.y + self.y * o.x, D)

    __rmul__ = __mul__

    def conj(self) -> "QuadElem":
        return QuadElem(self.x, -self.y, self.D)

    def norm(self) -> Fraction:
        return self.x * self.x - self.D * self.y * self.y

    def trace(self) -> Fraction:
        return 2 * self.x

    def inverse(self) -> "QuadElem":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by the zero element")
        return QuadElem(self.x / n, -self.y / n, self.D)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        self._same_field(o)
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result, base = QuadElem(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    @property
    def is_rational(self) -> bool:
        return self.y == 0

    def to_fraction(self) -> Fraction:
        if self.y:
            raise ValueError(f"{self} is irrational")
        return self.x

    def sign(self) -> int:
        """Exact sign, for a real field (D > 0)."""
        sx = (self.x > 0) - (self.x < 0)
        sy = (self.y > 0) - (self.y < 0)
        if sy == 0 or sx == sy:
            return sx if sx else sy
        if sx == 0:
            if self.D < 0:
                raise ValueError("sign of a non-real element")
            return sy
        if self.D < 0:
            raise ValueError("sign of a non-real element")
        return sx if self.x * self.x > self.y * self.y * self.D else sy

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def _cmp(self, other) -> int | None:
        o = self._lift(other)
        if o is None:
            return None
        return (self - o).sign()

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c >= 0

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if self.y == 0 and o.y == 0:
            return self.x == o.x
        return (self.x, self.y, self.D) == (o.x, o.y, o.D)

    def __hash__(self):
        if self.y == 0:
            return hash(self.x)
        return hash((self.x, self.y, self.D))

    def __bool__(self):
        return bool(self.x) or bool(self.y)

    def as_tuple(self) -> tuple[Fraction, Fraction, int]:
        return (self.x, self.y, self.D)

    def __repr__(self):
        return f"QuadElem({self.x!s}, {self.y!s}, {self.D})"

    def __str__(self):
        if self.y == 0:
            return str(self.x)
        return f"{self.x} + {self.y}*sqrt({self.D})"


def quad(x, y=0, D: int = 1) -> QuadElem:
    return QuadElem(x, y, D)


def quad_arith(op: str, u: QuadElem, v: QuadElem | None = None) -> QuadElem:
    """Field operation by name: add, sub, mul, div or conj (conj ignores v)."""
    if op == "conj":
        return u.conj()
    if v is None:
        raise TypeError(f"{op} needs two operands")
    if u.D != v.D:
        raise RadicandMismatch(f"radicands differ: {u.D} vs {v.D}")
    if op == "add":
        return u + v
    if op == "sub":
        return u - v
    if op == "mul":
        return u * v
    if op == "div":
        return u / v
    raise ValueError(f"unknown operation {op!r}")

