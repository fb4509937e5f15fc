"""Command line front end: eval, verify, sweep, optimize and constants.

Exit codes: 0 success, 1 a verification check failed, 2 usage or domain
error, 3 a series did not converge.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction

import gmpy2

from . import oracles, studies, verification
from .errors import DomainError, InvalidMu, NoConvergentMu, NotConverged, ParamSeriesError
from .exactmath import EXTRA_BITS, Real, as_exact, to_real, working
from .specialfn import constants, registry, sources
from .transform import StoppingRule

PREC_ENV = "PARAMSERIES_PREC"
DEFAULT_PREC = 256
MIN_PREC = 64

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_DIVERGED = 0, 1, 2, 3

REPORT_FIELDS = ("representation", "params", "mu", "precision_bits", "value", "terms",
                 "est_tail", "validity")
SWEEP_FIELDS = ("mu", "terms_to_tolerance", "final_error", "tolerance")

REPORT_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": list(REPORT_FIELDS),
    "properties": {
        "representation": {"type": "string"},
        "params": {"type": "object", "additionalProperties": {"type": "string"}},
        "mu": {"type": "string"},
        "precision_bits": {"type": "integer", "minimum": MIN_PREC},
        "value": {"type": "string"},
        "terms": {"type": "integer", "minimum": 0},
        "est_tail": {"type": "string"},
        "validity": {"type": "string", "enum": ["Safe", "Extended", "Invalid"]},
    },
}


class UsageError(Exception):
    pass


def output_digits(prec: int) -> int:
    return math.floor(prec * math.log10(2)) - 5


def decimal_string(value, digits: int) -> str:
    """Deterministic decimal rendering with ``digits`` significant digits."""
    x = value if isinstance(value, Real) else to_real(value, max(64, 4 * digits))
    if gmpy2.is_zero(x):
        return "0"
    if gmpy2.is_infinite(x):
        return "inf" if x > 0 else "-inf"
    if gmpy2.is_nan(x):
        return "nan"
    mant, exp, _ = x.digits(10, digits)
    sign = "-" if mant.startswith("-") else ""
    mant = mant.lstrip("-")
    if -5 < exp <= digits:
        if exp <= 0:
            return f"{sign}0.{'0' * -exp}{mant}"
        return f"{sign}{mant[:exp]}.{mant[exp:]}" if exp < len(mant) else f"{sign}{mant}"
    return f"{sign}{mant[0]}.{mant[1:]}e{exp - 1:+d}"


def compact(text: str) -> str:
    """Drop trailing zeros of a fixed-point decimal string."""
    if "." in text and "e" not in text:
        text = text.rstrip("0").rstrip(".")
    return text


def short(value) -> str:
    return decimal_string(value, 6)


def parse_number(text: str):
    """Exact Fraction for decimal or a/b input, otherwise a 256-bit real."""
    q = as_exact(text)
    if q is not None:
        return q
    try:
        return to_real(text, 256)
    except (TypeError, ValueError):
        raise UsageError(f"not a number: {text!r}") from None


def number_text(v) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else str(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Real):
        return decimal_string(v, 20)
    return str(v)


def default_precision() -> int:
    raw = os.environ.get(PREC_ENV)
    if raw is None:
        return DEFAULT_PREC
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{PREC_ENV} must be an integer, got {raw!r}") from None


def default_tolerance(prec: int) -> Fraction:
    return Fraction(1, 10 ** round(30 * prec / 256))


def stopping_rule(args) -> StoppingRule:
    prec = args.prec if args.prec is not None else default_precision()
    if prec < MIN_PREC:
        raise UsageError(f"precision must be at least {MIN_PREC} bits")
    tol = parse_number(args.tol) if args.tol else default_tolerance(prec)
    if tol <= 0 or to_real(tol, prec + 64) <= gmpy2.mul_2exp(gmpy2.mpfr(1, 64), -(prec + EXTRA_BITS)):
        raise UsageError(f"tolerance must exceed 2**-{prec + EXTRA_BITS}")
    if args.max_terms < 1:
        raise UsageError("max terms must be positive")
    return StoppingRule(tolerance=tol, max_terms=args.max_terms, target_bits=prec)


PARAM_FLAGS = ("x", "s", "a", "beta")


def collect_params(args, rep: registry.Representation) -> dict:
    params = {}
    for name in PARAM_FLAGS:
        text = getattr(args, name, None)
        if text is not None:
            params[name] = parse_number(text)
    if getattr(args, "variant", None) is not None:
        params["variant"] = args.variant
    if getattr(args, "unsquared", False):
        params["unsquared"] = True
    for item in getattr(args, "param", None) or []:
        key, sep, text = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects key=value, got {item!r}")
        params[key] = parse_number(text)
    return rep.resolve(params)


def report_row(rep_id, params, mu, prec, report) -> dict:
    return {
        "representation": rep_id,
        "params": {k: number_text(v) for k, v in sorted(params.items())},
        "mu": number_text(mu),
        "precision_bits": prec,
        "value": decimal_string(report.value, output_digits(prec)),
        "terms": report.terms_used,
        "est_tail": short(report.estimated_tail),
        "validity": report.validity.value,
    }


def render_rows(rows: list[dict], fields, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows if len(rows) != 1 else rows[0], indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(fields)
        for row in rows:
            writer.writerow([_flat(row[f]) for f in fields])
        return buf.getvalue()
    lines = []
    for row in rows:
        lines += [f"{f}: {_flat(row[f])}" for f in fields]
    return "\n".join(lines) + "\n"


def _flat(v):
    if isinstance(v, dict):
        return ";".join(f"{k}={val}" for k, val in v.items())
    return "NotReached" if v is None else v


def emit(text: str, path) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_eval(args) -> int:
    rep = registry.get(args.representation)
    params = collect_params(args, rep)
    stop = stopping_rule(args)
    mu = parse_number(args.mu)
    report = rep.run(params, mu, stop)
    emit(render_rows([report_row(rep.id, params, mu, stop.target_bits, report)],
                     REPORT_FIELDS, args.format), args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.inject_zeta_fault is not None:
        s = args.inject_zeta_fault
        sources.inject_zeta_fault(s, verification.flip_digit(s))
    try:
        results = verification.run_checks(args.only, args.n_max)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    finally:
        if args.inject_zeta_fault is not None:
            sources.clear_zeta_faults()
    failed = [r for r in results if not r.passed]
    if args.format == "json":
        text = json.dumps([{"check": r.name, "passed": r.passed, "detail": r.detail,
                            "finding": r.finding} for r in results], indent=2) + "\n"
    else:
        lines = []
        for r in results:
            lines.append(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}")
            if r.finding:
                lines.append(f"  finding: {r.finding}")
        lines.append(f"{len(results) - len(failed)}/{len(results)} checks passed")
        text = "\n".join(lines) + "\n"
    emit(text, args.output)
    return EXIT_VERIFY if failed else EXIT_OK


def parse_grid(text: str) -> list:
    return [parse_number(t) for t in text.split(",") if t.strip()]


def sweep_row(rec: studies.SweepRecord) -> dict:
    return {
        "mu": compact(decimal_string(rec.mu, 20)),
        "terms_to_tolerance": rec.terms_to_tolerance,
        "final_error": short(rec.final_error),
        "tolerance": short(rec.tolerance),
    }


def cmd_sweep(args) -> int:
    rep = registry.get(args.representation)
    params = collect_params(args, rep)
    stop = stopping_rule(args)
    cfg = studies.StudyConfig(rep.id, params, tuple(parse_grid(args.mu_grid)), stop.tolerance,
                              stop.max_terms, stop.target_bits)
    rows = [sweep_row(r) for r in studies.mu_sweep(cfg)]
    fmt = args.format or "csv"
    if fmt == "json":
        text = json.dumps(rows, indent=2) + "\n"
    else:
        text = render_rows(rows, SWEEP_FIELDS, "csv")
    emit(text, args.output)
    return EXIT_OK


def cmd_optimize(args) -> int:
    rep = registry.get(args.representation)
    params = collect_params(args, rep)
    stop = stopping_rule(args)
    mu, terms = studies.optimal_mu(rep.id, params, stop.tolerance,
                                   (parse_number(args.lo), parse_number(args.hi)),
                                   stop.max_terms, stop.target_bits)
    row = {"representation": rep.id, "mu": decimal_string(to_real(mu, 128), 12),
           "mu_exact": number_text(mu), "terms": terms, "tolerance": short(stop.tolerance)}
    emit(render_rows([row], tuple(row), args.format), args.output)
    return EXIT_OK


CONSTANT_BLOCKS = (
    ("pi", "pi_ref", ("pi-amore", "pi-digamma")),
    ("gamma", "gamma_ref", ("gamma-loggamma", "gamma-zeta-tail", "gamma-dyadic")),
    ("M", "m_ref", ("m-constant",)),
)


def constant_blocks(mu, stop: StoppingRule) -> list[dict]:
    prec = stop.target_bits
    digits = output_digits(prec)
    blocks = []
    for name, oracle_name, rep_ids in CONSTANT_BLOCKS:
        ref = getattr(oracles, oracle_name)(Fraction(1, 2 ** (prec + 32)))
        entries = [(f"reference ({ref.method})", ref.value, None)]
        for rep_id in rep_ids:
            report = registry.get(rep_id).run({}, mu, stop)
            entries.append((f"{rep_id} (mu={number_text(mu)})", report.value, report.terms_used))
        if name == "M":
            for alt in constants.m_constant_alternatives(stop):
                entries.append((alt.representation_id, alt.value, alt.report.terms_used))
        with working(prec + 32):
            rows = [{"source": label, "value": decimal_string(v, digits), "terms": t,
                     "delta_to_reference": short(abs(v - ref.value))} for label, v, t in entries]
            worst = max(abs(a[1] - b[1]) for a in entries for b in entries)
        block = {"constant": name, "entries": rows, "max_pairwise_delta": short(worst)}
        if name == "M":
            block["headline"] = verification.truncate6(ref.value)
        blocks.append(block)
    return blocks


def cmd_constants(args) -> int:
    stop = stopping_rule(args)
    blocks = constant_blocks(parse_number(args.mu), stop)
    if args.format == "json":
        text = json.dumps(blocks, indent=2) + "\n"
    elif args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("constant", "source", "value", "terms", "delta_to_reference"))
        for b in blocks:
            for e in b["entries"]:
                writer.writerow((b["constant"], e["source"], e["value"],
                                 "" if e["terms"] is None else e["terms"], e["delta_to_reference"]))
        text = buf.getvalue()
    else:
        lines = []
        for b in blocks:
            lines.append(f"{b['constant']}  (max pairwise delta {b['max_pairwise_delta']})")
            width = max(len(e["source"]) for e in b["entries"])
            for e in b["entries"]:
                terms = "" if e["terms"] is None else f"  terms {e['terms']}"
                lines.append(f"  {e['source']:<{width}}  {e['value']}  delta {e['delta_to_reference']}"
                             f"{terms}")
            if "headline" in b:
                lines.append(f"  first six decimals: {b['headline']}")
        text = "\n".join(lines) + "\n"
    emit(text, args.output)
    return EXIT_OK


def _common(p, fmt_default="plain"):
    p.add_argument("--prec", type=int, default=None,
                   help=f"working precision in bits (default ${PREC_ENV} or {DEFAULT_PREC})")
    p.add_argument("--tol", default=None, help="absolute tolerance, e.g. 1e-30 or 1/1000")
    p.add_argument("--max-terms", type=int, default=1000)
    p.add_argument("--format", choices=("json", "csv", "plain"), default=fmt_default)
    p.add_argument("--output", "-o", default=None, help="write to a file instead of stdout")


def _rep_args(p):
    p.add_argument("representation", help="representation id (see 'list')")
    for name in PARAM_FLAGS:
        p.add_argument(f"--{name}", default=None)
    p.add_argument("--variant", default=None, choices=[v.value for v in constants.PrefixVariant])
    p.add_argument("--unsquared", action="store_true",
                   help="elliptic integrals with unsquared central binomial coefficients")
    p.add_argument("--param", action="append", metavar="KEY=VALUE")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="paramseries",
                                     description="Series with a free parameter: evaluation and studies.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate one representation")
    _rep_args(p)
    p.add_argument("--mu", default="1")
    _common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="run the self-check suite")
    p.add_argument("--only", action="append", metavar="CHECK",
                   help="run only this check (repeatable): " + ", ".join(verification.CHECKS))
    p.add_argument("--n-max", type=int, default=None,
                   help="size of the exact checks (binomial identity, zeta bounds, mu = 0)")
    p.add_argument("--inject-zeta-fault", type=int, default=None, metavar="S",
                   help=argparse.SUPPRESS)
    p.add_argument("--format", choices=("json", "plain"), default="plain")
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="terms to tolerance over a grid of mu values (CSV)")
    _rep_args(p)
    p.add_argument("--mu-grid", default="1/3,1/2,1", help="comma separated, may be empty")
    _common(p, fmt_default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize", help="search an interval for the mu needing fewest terms")
    _rep_args(p)
    p.add_argument("--lo", required=True)
    p.add_argument("--hi", required=True)
    _common(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("constants", help="pi, gamma and M from several series")
    p.add_argument("--mu", default="1")
    _common(p)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("list", help="list representation ids and their parameters")
    p.set_defaults(func=cmd_list)
    return parser


def cmd_list(args) -> int:
    for rep_id in sorted(registry.REGISTRY):
        rep = registry.REGISTRY[rep_id]
        params = ", ".join(f"{k}={number_text(v)}" for k, v in rep.defaults.items()) or "-"
        sys.stdout.write(f"{rep_id:16s} {rep.target:26s} {params:22s} {rep.description}\n")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except NotConverged as exc:
        sys.stderr.write(f"paramseries: not converged: {exc}\n")
        return EXIT_DIVERGED
    except NoConvergentMu as exc:
        sys.stderr.write(f"paramseries: {exc}\n")
        return EXIT_DIVERGED
    except (UsageError, DomainError, InvalidMu, ZeroDivisionError, ValueError) as exc:
        sys.stderr.write(f"paramseries: {exc}\n")
        return EXIT_USAGE
    except ParamSeriesError as exc:
        sys.stderr.write(f"paramseries: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
