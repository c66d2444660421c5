"""Command-line front end: catalog, verify, sweep, expand, transform."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import families as fam
from .errors import CFError, FamilyError, InvalidParams, ParseError
from .verify import (DEFAULT_DIGITS, DEFAULT_TERMS, ConfigError, default_sweep, exit_code, render_report,
                     run_expand, run_sweep, run_transform, run_verify, write_report)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; usage errors here exit with 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _add_report_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--report", metavar="PATH", help="write the report(s) to PATH")
    p.add_argument("--format", choices=("json", "csv"), default="json", help="report format (default json)")
    p.add_argument("--timestamps", action="store_true", help="add a timestamp field to reports")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cfcert", description="Certified checks of continued-fraction identities.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("catalog", help="print the family catalog as JSON")

    v = sub.add_parser("verify", help="verify one family at one parameter set")
    v.add_argument("--family", required=True)
    v.add_argument("--set", dest="params", default="", metavar="k=v[,k=v...]",
                   help='parameter values; rationals as "p/q", integer lists as "1:2:3"')
    v.add_argument("--digits", type=_positive, default=DEFAULT_DIGITS)
    v.add_argument("--terms", type=_positive, default=DEFAULT_TERMS)
    _add_report_flags(v)

    s = sub.add_parser("sweep", help="verify parameter grids from a JSON config")
    s.add_argument("config", nargs="?", help='JSON config path; omit with --all for every default grid')
    s.add_argument("--all", action="store_true", help="sweep all families over their default grids")
    s.add_argument("--digits", type=_positive, default=DEFAULT_DIGITS)
    s.add_argument("--terms", type=_positive, default=DEFAULT_TERMS)
    s.add_argument("--workers", type=_positive, default=1)
    _add_report_flags(s)

    e = sub.add_parser("expand", help="certified regular CF quotients of a value")
    e.add_argument("--expr", required=True,
                   help='closed_form(family, k=v, ...) | tan/tanh/exp(x) | rational; x may be r/sqrt(n)')
    e.add_argument("--terms", type=_positive, default=20)
    e.add_argument("--digits", type=_positive, default=30, help="starting precision (refined on demand)")

    t = sub.add_parser("transform", help="contract, lift or regularize a CF literal")
    t.add_argument("kind", choices=("even", "odd", "lift", "regularize"))
    t.add_argument("literal", help='"[a0; a1, ...]" or "{b0; a1:b1, ...}"')
    t.add_argument("--p", type=int, help="lift parameter (lift only)")
    return parser


def _emit_reports(args, reports) -> None:
    if args.report:
        try:
            write_report(reports, args.report, args.format, args.timestamps)
        except OSError as exc:
            raise UsageError(f"--report: cannot write {args.report}: {exc}") from exc


def _print_report(r) -> None:
    print(f"family:          {r.family}")
    print(f"params:          {r.params}")
    print(f"digits:          {r.digits}")
    print(f"terms used:      {r.terms_used}")
    if r.cf_enclosure:
        print(f"cf enclosure:    [{r.cf_enclosure[0]}, {r.cf_enclosure[1]}]")
        print(f"closed form:     [{r.closed_form_enclosure[0]}, {r.closed_form_enclosure[1]}]")
    print(f"matched digits:  {r.matched_digits}")
    print(f"status:          {r.status}")
    if r.error:
        print(f"error:           {r.error}")


def _cmd_catalog(args) -> int:
    print(json.dumps(fam.catalog_document(), indent=2, ensure_ascii=False))
    return 0


def _cmd_verify(args) -> int:
    if args.family not in fam.catalog():
        raise UsageError(f"--family: unknown family {args.family!r}")
    try:
        params = fam.parse_params(args.family, args.params)
    except ParseError as exc:
        raise UsageError(str(exc)) from exc
    try:
        report = run_verify(args.family, params, args.digits, args.terms)
    except InvalidParams as exc:
        lines = "\n".join(f"  violation: {v}" for v in exc.violations)
        raise UsageError(f"--set: invalid parameters for {args.family}\n{lines}") from exc
    _print_report(report)
    _emit_reports(args, [report])
    return report.exit_code


def _cmd_sweep(args) -> int:
    if args.all:
        jobs = default_sweep(args.digits, args.terms)
    elif args.config:
        try:
            doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise UsageError(f"config: cannot read {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"config: line {exc.lineno}: {exc.msg}") from exc
        doc.setdefault("digits", args.digits) if isinstance(doc, dict) else None
        doc.setdefault("terms", args.terms) if isinstance(doc, dict) else None
        jobs = doc
    else:
        raise UsageError("config: give a config path or --all")
    try:
        result = run_sweep(jobs, workers=args.workers)
    except ConfigError as exc:
        raise UsageError(str(exc)) from exc
    for r in result.reports:
        extra = f"  ({r.error})" if r.error else ""
        print(f"{r.status:<12} {r.family:<18} {r.params:<40} matched={r.matched_digits}{extra}")
    s = result.summary
    print(f"summary: {s['verified']} verified, {s['inconclusive']} inconclusive, "
          f"{s['violated']} violated, {s['invalid']} invalid, {s['total']} total")
    _emit_reports(args, result.reports)
    return result.exit_code


def _cmd_expand(args) -> int:
    try:
        out = run_expand(args.expr, args.terms, args.digits)
    except ParseError as exc:
        raise UsageError(str(exc)) from exc
    print(out.literal())
    return 0


def _cmd_transform(args) -> int:
    try:
        result = run_transform(args.kind, args.literal, args.p)
    except ParseError as exc:
        msg = str(exc)
        raise UsageError(msg if msg.startswith("--") else f"literal: {msg}") from exc
    for line in result.lines:
        print(line)
    return 0


COMMANDS = {"catalog": _cmd_catalog, "verify": _cmd_verify, "sweep": _cmd_sweep,
            "expand": _cmd_expand, "transform": _cmd_transform}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except CFError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
