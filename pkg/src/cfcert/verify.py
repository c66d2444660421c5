"""Verification runs, sweeps, expansions and transforms behind the CLI."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from . import families as fam
from .cf import (GeneralizedCF, RCFExpansion, RegularCF, cf_enclosure, format_gcf, format_rcf,
                 gcf_approximants, parse_cf_literal, parse_rcf, rcf_expand, regularize, signed_value)
from .errors import CFError, FamilyError, InvalidParams, ParseError
from .numerics import IntervalReal, QuadElem, format_rational, parse_rational, quad_to_interval
from .qseries import elementary_interval
from .transform import corfl_lift, even_part, odd_part

DEFAULT_DIGITS = 40
DEFAULT_TERMS = 60
# enclosures are computed this many digits beyond the request so that the
# union of two tight intervals still fits inside 10**-digits
EXTRA_DIGITS = 2

STATUS_RANK = {"verified": 0, "invalid": 1, "inconclusive": 2, "violated": 3}
EXIT_CODES = {"verified": 0, "invalid": 1, "inconclusive": 2, "violated": 3}
REPORT_FIELDS = ("family", "params", "digits", "terms_used", "cf_enclosure", "closed_form_enclosure",
                 "matched_digits", "status", "elapsed_ms")


@dataclass
class VerificationReport:
    family: str
    params: str
    digits: int
    terms_used: int
    cf_enclosure: list[str] | None
    closed_form_enclosure: list[str] | None
    matched_digits: int | str
    status: str
    elapsed_ms: int
    error: str | None = None

    def to_dict(self, timestamp: str | None = None) -> dict:
        out = {k: getattr(self, k) for k in REPORT_FIELDS}
        if self.error is not None:
            out["error"] = self.error
        if timestamp is not None:
            out["timestamp"] = timestamp
        return out

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]


def exit_code(reports: Iterable[VerificationReport]) -> int:
    worst = max((r.status for r in reports), key=STATUS_RANK.__getitem__, default="verified")
    return EXIT_CODES[worst]


def matched_digits(a: IntervalReal, b: IntervalReal) -> int | str:
    """Largest d with the union of two overlapping enclosures narrower than 10**-d."""
    if not a.overlaps(b):
        return 0
    if a.exact is not None and a.exact == b.exact:
        return "exact"
    width = max(a.hi, b.hi) - min(a.lo, b.lo)
    if width == 0:
        return "exact"
    d = max(0, -math.floor((width.numerator.bit_length() - width.denominator.bit_length()) * 0.30103) - 2)
    while width < Fraction(1, 10 ** (d + 1)):
        d += 1
    while d > 0 and width >= Fraction(1, 10**d):
        d -= 1
    return d


def _status(a: IntervalReal, b: IntervalReal, digits: int) -> tuple[str, int | str]:
    if not a.overlaps(b):
        return "violated", 0
    m = matched_digits(a, b)
    if m == "exact" or m >= digits:
        return "verified", m
    return "inconclusive", m


def _coerce_params(fid: str, params) -> dict:
    if isinstance(params, str):
        return fam.parse_params(fid, params)
    spec = fam.get_family(fid)
    kinds = {p.name: p for p in spec.params}
    out = {}
    for k, v in params.items():
        prm = kinds.get(k)
        if isinstance(v, str) and prm is not None:
            v = prm.parse(v)
        elif isinstance(v, list):
            v = tuple(v)
        out[k] = v
    return out


def run_verify(family: str, params, digits: int = DEFAULT_DIGITS, terms: int = DEFAULT_TERMS) -> VerificationReport:
    """Compare the expansion of a family against its closed form.

    Raises FamilyError for an unknown family and InvalidParams (listing the
    violated constraints) when the parameters do not validate.
    """
    start = time.perf_counter()
    spec = fam.get_family(family)
    p = _coerce_params(family, params)
    violations = fam.validate_params(family, p)
    if violations:
        raise InvalidParams(family, violations)
    text = fam.format_params(family, p)
    work = digits + EXTRA_DIGITS

    def done(**kw) -> VerificationReport:
        elapsed = int((time.perf_counter() - start) * 1000)
        return VerificationReport(family, text, digits, elapsed_ms=elapsed, **kw)

    if spec.finite:
        cf = fam.family_cf(family, p)
        used = len(cf.terms()) if isinstance(cf, GeneralizedCF) else len(cf.terms())
        lhs, rhs = fam.expansion_value(family, p), fam.exact_value(family, p)
        a = IntervalReal.from_fraction(lhs, work)
        b = IntervalReal.from_fraction(rhs, work)
        if lhs == rhs:
            status, m = "verified", "exact"
        else:
            status, m = "violated", 0
        return done(terms_used=used, cf_enclosure=list(a.decimal_bounds(work)),
                    closed_form_enclosure=list(b.decimal_bounds(work)), matched_digits=m, status=status)

    try:
        enc = cf_enclosure(fam.family_cf(family, p), work, max_terms=terms)
        closed = fam.closed_form(family, p, work)
    except CFError as exc:
        return done(terms_used=0, cf_enclosure=None, closed_form_enclosure=None, matched_digits=0,
                    status="inconclusive", error=f"{type(exc).__name__}: {exc}")
    status, m = _status(enc.interval, closed, digits)
    return done(terms_used=enc.terms_used, cf_enclosure=list(enc.interval.decimal_bounds(work)),
                closed_form_enclosure=list(closed.decimal_bounds(work)), matched_digits=m, status=status)


def invalid_report(family: str, params, digits: int, message: str) -> VerificationReport:
    if isinstance(params, dict):
        try:
            text = fam.format_params(family, params)
        except (CFError, KeyError):
            text = json.dumps(params, sort_keys=True, default=str)
    else:
        text = str(params)
    return VerificationReport(family, text, digits, 0, None, None, 0, "invalid", 0, error=message)


# sweeps ---------------------------------------------------------------------


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SweepJob:
    family: str
    params: object
    digits: int
    terms: int


@dataclass
class SweepResult:
    reports: list[VerificationReport]
    summary: dict = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return exit_code(self.reports)


def _int_field(doc: dict, key: str, where: str, default: int) -> int:
    v = doc.get(key, default)
    if not isinstance(v, int) or isinstance(v, bool) or v < 1:
        raise ConfigError(f"{where}{key}: expected a positive integer, got {v!r}")
    return v


def parse_sweep_config(doc) -> list[SweepJob]:
    """Expand a sweep document into jobs.

    Shape: {"digits": 40, "terms": 60, "jobs": "all" | [{"family": id,
    "grid": "default" | [params, ...], "digits"?: n, "terms"?: n}, ...]}.
    A params entry is an object (values may be "p/q" strings) or a "k=v,..." string.
    """
    if not isinstance(doc, dict):
        raise ConfigError("config: top level must be an object")
    unknown = sorted(set(doc) - {"digits", "terms", "jobs", "workers"})
    if unknown:
        raise ConfigError(f"config: unknown field {unknown[0]!r}")
    digits = _int_field(doc, "digits", "", DEFAULT_DIGITS)
    terms = _int_field(doc, "terms", "", DEFAULT_TERMS)
    jobs_doc = doc.get("jobs", [])
    if jobs_doc == "all":
        jobs_doc = [{"family": fid, "grid": "default"} for fid in fam.catalog()]
    if not isinstance(jobs_doc, list):
        raise ConfigError("jobs: expected a list or \"all\"")
    out = []
    for i, job in enumerate(jobs_doc):
        where = f"jobs[{i}]."
        if not isinstance(job, dict):
            raise ConfigError(f"jobs[{i}]: expected an object")
        fid = job.get("family")
        if fid not in fam.catalog():
            raise ConfigError(f"{where}family: unknown family {fid!r}")
        d = _int_field(job, "digits", where, digits)
        t = _int_field(job, "terms", where, terms)
        grid = job.get("grid", "default")
        if grid == "default":
            grid = fam.default_grid(fid)
        if not isinstance(grid, list):
            raise ConfigError(f"{where}grid: expected a list of parameter sets or \"default\"")
        for j, g in enumerate(grid):
            if not isinstance(g, (dict, str)):
                raise ConfigError(f"{where}grid[{j}]: expected an object or a \"k=v,...\" string")
            out.append(SweepJob(fid, g, d, t))
    return out


def _run_job(job: SweepJob) -> VerificationReport:
    try:
        return run_verify(job.family, job.params, job.digits, job.terms)
    except InvalidParams as exc:
        return invalid_report(job.family, job.params, job.digits, "; ".join(exc.violations))
    except (ParseError, FamilyError) as exc:
        return invalid_report(job.family, job.params, job.digits, str(exc))


def summarize(reports: Sequence[VerificationReport]) -> dict:
    out = {k: 0 for k in STATUS_RANK}
    for r in reports:
        out[r.status] += 1
    out["total"] = len(reports)
    return out


def run_sweep(config, workers: int = 1) -> SweepResult:
    """One report per grid point, in grid order."""
    jobs = parse_sweep_config(config) if not isinstance(config, list) else config
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_run_job, jobs))
    else:
        reports = [_run_job(j) for j in jobs]
    return SweepResult(reports, summarize(reports))


def default_sweep(digits: int = DEFAULT_DIGITS, terms: int = DEFAULT_TERMS) -> list[SweepJob]:
    return [SweepJob(fid, p, digits, terms) for fid in fam.catalog() for p in fam.default_grid(fid)]


# reports --------------------------------------------------------------------


def _timestamp() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def render_report(reports: Sequence[VerificationReport], fmt: str = "json", timestamps: bool = False) -> str:
    stamp = _timestamp() if timestamps else None
    rows = [r.to_dict(stamp) for r in reports]
    if fmt == "json":
        return json.dumps(rows, sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        fields = list(REPORT_FIELDS) + ["error"] + (["timestamp"] if timestamps else [])
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for row in rows:
            flat = {k: (" ".join(v) if isinstance(v, list) else v) for k, v in row.items()}
            w.writerow(flat)
        return buf.getvalue()
    raise ValueError(f"unknown report format {fmt!r}")


def write_report(reports: Sequence[VerificationReport], path, fmt: str = "json", timestamps: bool = False) -> Path:
    path = Path(path)
    path.write_text(render_report(reports, fmt, timestamps), encoding="utf-8")
    return path


def stable_digest(reports: Sequence[VerificationReport]) -> str:
    """SHA-256 of the JSON rendering without the elapsed field."""
    rows = [{k: v for k, v in r.to_dict().items() if k != "elapsed_ms"} for r in reports]
    return hashlib.sha256(json.dumps(rows, sort_keys=True).encode()).hexdigest()


# expansion of constants -----------------------------------------------------

_CLOSED = re.compile(r"^closed_form\(\s*([A-Za-z0-9_]+)\s*(?:,(.*))?\)$")
_FUNC = re.compile(r"^(tan|tanh|exp)\((.*)\)$")
_SURD = re.compile(r"^(?:([+-]?\d+(?:/\d+)?)\s*([*/])\s*)?(?:sqrt\(\s*(\d+)\s*\)|√\s*(\d+))$")


def _parse_arg(text: str):
    """A rational, or r*sqrt(n) / r/sqrt(n) / sqrt(n)."""
    t = text.strip()
    m = _SURD.match(t)
    if m:
        coef = parse_rational(m.group(1)) if m.group(1) else Fraction(1)
        n = int(m.group(3) or m.group(4))
        if m.group(2) == "/":
            if n == 0:
                raise ParseError("division by sqrt(0)")
            return QuadElem(0, coef / n, n) if n > 1 else coef
        return QuadElem(0, coef, n) if n > 1 else coef * n
    try:
        return parse_rational(t)
    except (ParseError, ValueError):
        raise ParseError(f"--expr: cannot parse argument {text!r}") from None


def parse_value_expr(expr: str, digits: int = 30) -> IntervalReal:
    s = expr.strip()
    m = _CLOSED.match(s)
    if m:
        fid = m.group(1)
        params = fam.parse_params(fid, (m.group(2) or "").strip())
        return fam.closed_form(fid, params, digits)
    m = _FUNC.match(s)
    if m:
        arg = _parse_arg(m.group(2))
        if isinstance(arg, QuadElem) and arg.is_rational:
            arg = arg.to_fraction()
        return elementary_interval(m.group(1), arg, digits)
    if _SURD.match(s):
        x = _parse_arg(s)
        return quad_to_interval(x, digits) if isinstance(x, QuadElem) else IntervalReal.from_fraction(x, digits)
    try:
        x = parse_rational(s)
    except (ParseError, ValueError):
        raise ParseError(f"--expr: cannot parse {expr!r}") from None
    return IntervalReal.from_fraction(x, digits)


def run_expand(expr: str, terms: int = 20, digits: int = 30) -> RCFExpansion:
    """Certified quotients a0..a_terms of the value of ``expr``."""
    x = parse_value_expr(expr, digits)
    out = rcf_expand(x, terms)
    if out.uncertified_at is not None:
        raise CFError(f"certification failed at index {out.uncertified_at}")
    return out


# transforms -----------------------------------------------------------------


@dataclass
class TransformResult:
    output: str
    lines: list[str]


def _fmt(x) -> str:
    return format_rational(x) if isinstance(x, Fraction) else str(x)


def _projective(P, Q) -> str:
    return "undefined" if Q == 0 else _fmt(Fraction(P, Q))


def run_transform(kind: str, literal: str, p: int | None = None) -> TransformResult:
    kind = kind.lower()
    if kind in ("even", "odd"):
        cf = parse_cf_literal(literal)
        g = cf.to_gcf() if isinstance(cf, RegularCF) else cf
        out = even_part(g) if kind == "even" else odd_part(g)
        terms = out.terms()
        text = format_gcf(out.b0, terms, truncated=g.truncated)
        lines = [text]
        n_in = len(g.terms())
        orig = gcf_approximants(g, n_in)
        new = gcf_approximants(out, len(terms))
        checks = []
        for k in range(1, len(terms) + 1):
            j = 2 * k if kind == "even" else 2 * k + 1
            if j > n_in:
                break
            (A, B), (C, D) = new[k], orig[j]
            ok = A * D == B * C
            checks.append(ok)
            if k <= 5:
                lines.append(f"approximant {k} = {_projective(A, B)} vs input approximant {j}: {'ok' if ok else 'MISMATCH'}")
        if checks and not all(checks):
            raise CFError("approximant spot-check failed")
        return TransformResult(text, lines)
    if kind == "regularize":
        cf = parse_rcf(literal)
        if not cf.is_finite or cf.truncated:
            out = regularize(cf)
            return TransformResult(out.literal(), [out.literal()])
        out = regularize(cf)
        before = signed_value([cf.head] + cf.terms())
        after = signed_value([out.head] + out.terms())
        text = format_rcf(out.head, out.terms())
        return TransformResult(text, [text, f"value {_projective(*before)} = {_projective(*after)}"])
    if kind == "lift":
        if p is None:
            raise ParseError("--p: lift needs a parameter p >= 2")
        cf = parse_rcf(literal)
        signed = corfl_lift(p, cf)
        signed_text = format_rcf(signed.head, signed.terms(), truncated=cf.truncated)
        reg = regularize(signed)
        reg_text = format_rcf(reg.head, reg.terms(), truncated=cf.truncated)
        lines = [f"signed: {signed_text}", f"regularized: {reg_text}"]
        if not cf.truncated:
            base = Fraction(*signed_value([cf.head] + cf.terms()))
            lifted = Fraction(*signed_value([reg.head] + reg.terms()))
            diff = lifted - base
            if diff != Fraction(1, p):
                raise CFError(f"lift value check failed: difference {diff}, expected 1/{p}")
            lines.append(f"value {_fmt(lifted)} - {_fmt(base)} = {_fmt(diff)} = 1/{p}")
        return TransformResult(reg_text, lines)
    raise ParseError(f"transform: unknown kind {kind!r} (expected even, odd, lift or regularize)")
