"""Even and odd contractions, the odd-part lift and the Worpitzky guard."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import count
from typing import Callable, Iterable, Sequence

from .cf import GeneralizedCF, RegularCF, _exact, equivalence_transform
from .errors import ContractionError, LiftError

QUARTER = Fraction(1, 4)


def _nonzero(b, index: int, what: str):
    if b == 0:
        raise ContractionError(f"{what} b_{index} is zero", index=index)
    return b


def even_part(gcf: GeneralizedCF) -> GeneralizedCF:
    """Contraction whose k-th approximant is the input's 2k-th."""

    def gen():
        it = iter(gcf)
        try:
            a1, b1 = next(it)
            a2, b2 = next(it)
        except StopIteration:
            return
        _nonzero(b2, 2, "even-indexed denominator")
        yield b2 * a1, b2 * b1 + a2
        prev_a, prev_b = a2, b2  # a_{2k-2}, b_{2k-2}
        for k in count(2):
            try:
                a_odd, b_odd = next(it)
                a_even, b_even = next(it)
            except StopIteration:
                return
            _nonzero(b_even, 2 * k, "even-indexed denominator")
            yield (-prev_a * a_odd * b_even / prev_b,
                   a_even + b_odd * b_even + a_odd * b_even / prev_b)
            prev_a, prev_b = a_even, b_even

    if gcf.is_finite:
        return GeneralizedCF(gcf.b0, list(gen()), truncated=gcf.truncated)
    return GeneralizedCF(gcf.b0, gen)


def odd_part(gcf: GeneralizedCF) -> GeneralizedCF:
    """Contraction whose constant term is A_1/B_1 and k-th approximant the input's (2k+1)-th."""
    first = gcf.term(1)
    if first is None:
        return GeneralizedCF(gcf.b0, [])
    a1, b1 = first
    _nonzero(b1, 1, "odd-indexed denominator")
    c0 = (gcf.b0 * b1 + a1) / b1

    def gen():
        it = iter(gcf)
        next(it)
        try:
            a2, b2 = next(it)
            a3, b3 = next(it)
        except StopIteration:
            return
        _nonzero(b3, 3, "odd-indexed denominator")
        yield -a1 * a2 * b3 / b1, b1 * (a3 + b2 * b3) + a2 * b3
        prev_a, prev_b = a3, b3  # a_{2k-1}, b_{2k-1}
        for k in count(2):
            try:
                a_even, b_even = next(it)
                a_odd, b_odd = next(it)
            except StopIteration:
                return
            _nonzero(b_odd, 2 * k + 1, "odd-indexed denominator")
            c = -prev_a * a_even * b_odd / prev_b
            if k == 2:
                c *= b1
            yield c, a_odd + b_even * b_odd + a_even * b_odd / prev_b
            prev_a, prev_b = a_odd, b_odd

    if gcf.is_finite:
        return GeneralizedCF(c0, list(gen()), truncated=gcf.truncated)
    return GeneralizedCF(c0, gen)


def _as_stream(c) -> tuple[Callable[[], Iterable], bool]:
    if callable(c):
        return (lambda: (c(n) for n in count(1))), False
    seq = list(c)
    return (lambda: iter(seq)), True


def doubled_sequence(c) -> GeneralizedCF:
    """c1/1 - c2/1 + c2/1 - c3/1 + c3/1 - ... for a sequence or a callable n -> c_n."""
    stream, finite = _as_stream(c)

    def gen():
        for n, cn in enumerate(stream(), 1):
            cn = _exact(cn)
            if n == 1:
                yield cn, Fraction(1)
            else:
                yield -cn, Fraction(1)
                yield cn, Fraction(1)

    return GeneralizedCF(0, list(gen())) if finite else GeneralizedCF(0, gen)


def odd_part_doubled(c) -> GeneralizedCF:
    """c1 + c1c2/1 + c2c3/1 + c3c4/1 + ..., the odd part of :func:`doubled_sequence`."""
    stream, finite = _as_stream(c)
    it = iter(stream())
    try:
        c1 = _exact(next(it))
    except StopIteration:
        raise ValueError("empty c-sequence") from None
    if c1 == 0:
        raise ValueError("c_1 is zero")

    def gen():
        src = iter(stream())
        prev = _exact(next(src))
        for n, cn in enumerate(src, 2):
            cn = _exact(cn)
            if cn == 0:
                raise ValueError(f"c_{n} is zero")
            yield prev * cn, Fraction(1)
            prev = cn

    return GeneralizedCF(c1, list(gen())) if finite else GeneralizedCF(c1, gen)


@dataclass(frozen=True)
class WorpitzkyResult:
    ok: bool
    witness: int | None = None

    def __bool__(self):
        return self.ok


def worpitzky_check(gcf: GeneralizedCF, n: int, start: int = 1) -> WorpitzkyResult:
    """Check |a_k| <= 1/4 for start <= k <= n on the unit-denominator form.

    Terms with b_k != 1 are first normalized by an equivalence transform; a
    zero b_k counts as a violation at that index.
    """
    terms = gcf.terms(n) if not gcf.is_finite else gcf.terms()[:n]
    for k, (_, b) in enumerate(terms, 1):
        if b == 0:
            return WorpitzkyResult(False, k)
    unit = equivalence_transform(GeneralizedCF(gcf.b0, terms), [1 / b for _, b in terms])
    for k, (a, _) in enumerate(unit.terms(), 1):
        if k >= start and not abs(a) <= QUARTER:
            return WorpitzkyResult(False, k)
    return WorpitzkyResult(True)


def lift_ocf(p: int, rcf: RegularCF) -> GeneralizedCF:
    """The unit-denominator fraction whose odd part is 1/p + [0; a1, a2, ...].

    Terms: 1/p, then -c_j, c_j for each quotient a_j with c_j = p/a_j for odd j
    and 1/(p a_j) for even j.
    """

    def gen():
        yield Fraction(1, p), Fraction(1)
        for j, a in enumerate(rcf, 1):
            if a == 0:
                raise LiftError(f"zero quotient at index {j}", index=j)
            c = Fraction(p, a) if j % 2 else Fraction(1, p * a)
            yield -c, Fraction(1)
            yield c, Fraction(1)

    if rcf.is_finite:
        return GeneralizedCF(0, list(gen()))
    return GeneralizedCF(0, gen)


def corfl_lift(p: int, rcf: RegularCF, guard_terms: int = 50, stage: int | None = None) -> RegularCF:
    """Signed expansion [0; p, -a1/p^2, -p, a2, p, -a3/p^2, -p, a4, ...] of 1/p + rcf.

    A finite input of even length ends with a lone p (the next block with an
    infinite odd quotient), so finite identities hold exactly.

    ``rcf`` must have head 0 and p^2 must divide every odd-indexed quotient
    (checked as the output is generated).  Convergence of the underlying
    unit-denominator fraction is guarded by Worpitzky's bound on its first
    ``guard_terms`` terms after the leading 1/p (infinite inputs only).  The result is usually fed to
    :func:`~cfcert.cf.regularize`.
    """
    if not isinstance(p, int) or p < 2:
        raise LiftError(f"lift parameter must be an integer >= 2, got {p}", stage=stage)
    if rcf.head != 0:
        raise LiftError(f"lift needs head 0, got {rcf.head}", stage=stage)
    # a finite input is a rational identity checked exactly downstream; the
    # guard is only about convergence of an infinite expansion
    guard = worpitzky_check(lift_ocf(p, rcf), guard_terms, start=2) if not rcf.is_finite else True
    if not guard:
        raise LiftError(f"convergence guard failed: |a_{guard.witness}| > 1/4 in the lifted fraction",
                        index=guard.witness, stage=stage)
    p2 = p * p

    def gen():
        it = iter(rcf)
        for n in count(1):
            try:
                a_odd = next(it)
            except StopIteration:
                # an even number of quotients ends the block with p alone
                yield p
                return
            if a_odd % p2:
                raise LiftError(f"p^2 = {p2} does not divide a_{2 * n - 1} = {a_odd}", index=2 * n - 1, stage=stage)
            yield p
            yield -(a_odd // p2)
            yield -p
            try:
                yield next(it)
            except StopIteration:
                return

    if rcf.is_finite:
        return RegularCF(0, list(gen()), truncated=rcf.truncated)
    return RegularCF(0, gen)


def iterated_lift(ps: Sequence[int], rcf: RegularCF, guard_terms: int = 50) -> RegularCF:
    """Apply :func:`corfl_lift` once per entry of ``ps``, in order."""
    out = rcf
    for stage, p in enumerate(ps):
        out = corfl_lift(p, out, guard_terms, stage=stage)
    return out
