"""Command-line front end.

Exit codes: 0 success, 2 bad input polynomial, 3 bad weights or variable
index, 4 certification budget exceeded, 5 weights do not preserve F,
10 a direction with negative energy was found (search/certify).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .certify import DEFAULT_BOX_LIMIT, certify_min, subset_count
from .envelope import build_envelope
from .errors import CombinatorialBudgetExceeded, NotInvariant, SupportError, WeightError
from .polynomial import Support, load_support, serialize_support, validate_support
from .rational import fmt, fmt_vector, parse_vector
from .search import SearchConfig, search_min
from .stability import as_weights, compute_weights, phi_lines, report

SCHEMA_VERSION = "1"

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_WEIGHTS = 3
EXIT_BUDGET = 4
EXIT_NOT_INVARIANT = 5
EXIT_VIOLATION = 10


class _Exit(Exception):
    def __init__(self, code: int, message: str) -> None:
        self.code = code
        super().__init__(message)


def _read_input(path: str) -> tuple[Support, bytes]:
    if path == "-":
        data = sys.stdin.buffer.read()
        kind = "poly"
    else:
        try:
            data = Path(path).read_bytes()
        except OSError as exc:
            raise _Exit(EXIT_INPUT, f"cannot read {path}: {exc.strerror}") from exc
        kind = "json" if path.lower().endswith(".json") else "poly"
    try:
        return load_support(data, kind), data
    except SupportError as exc:
        raise _Exit(EXIT_INPUT, str(exc)) from exc


def _weights(text: str, support: Support):
    try:
        return as_weights(parse_vector(text), support.n)
    except (ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, WeightError):
            raise _Exit(EXIT_WEIGHTS, str(exc)) from exc
        raise _Exit(EXIT_WEIGHTS, f"cannot parse weights {text!r}: {exc}") from exc


def _strs(values) -> list[str]:
    return [fmt(v) for v in values]


def _emit(args, command: str, data: bytes, payload: dict, warnings: Sequence[str], text: list[str]) -> None:
    if args.json:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "command": command,
            "input_digest": hashlib.sha256(data).hexdigest(),
            "payload": payload,
            "warnings": list(warnings),
        }
        sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        for w in warnings:
            text.append(f"warning: {w}")
        sys.stdout.write("\n".join(text) + "\n")


def _add_floats(payload: dict, keys: Sequence[str]) -> None:
    for key in keys:
        value = payload[key]
        if isinstance(value, list):
            payload[f"{key}_float"] = [float(Fraction(v)) for v in value]
        elif value is not None:
            payload[f"{key}_float"] = float(Fraction(value))


# --- subcommands -------------------------------------------------------------


def cmd_eval(args) -> int:
    support, data = _read_input(args.file)
    lam = _weights(args.lam, support)
    rep = report(support, lam)
    wd = rep.weight_data
    gen = rep.genericity
    payload: dict[str, Any] = {
        "n": support.n,
        "d": support.d,
        "lambda": _strs(lam),
        "w": _strs(wd.w),
        "lambda_max": fmt(wd.lambda_max),
        "delta": fmt(wd.delta),
        "delta_i": _strs(wd.delta_i),
        "order": list(wd.order),
        "penalties": _strs(rep.penalties),
        "energy": fmt(rep.energy),
        "limit": fmt(rep.limit),
        "energy_reverse": fmt(rep.energy_reverse),
        "limit_reverse": fmt(rep.limit_reverse),
        "inequality_holds": rep.inequality_holds,
        "generic": gen.generic,
        "delta_ties": [list(t) for t in gen.delta_ties],
        "concurrent_triples": [{"variable": k, "monomials": list(t)} for k, t in gen.concurrent],
        "invariant": rep.kappa is not None,
        "kappa": None if rep.kappa is None else fmt(rep.kappa),
        "futaki": None if rep.futaki is None else fmt(rep.futaki),
    }
    if args.float:
        _add_floats(payload, ["energy", "limit", "energy_reverse", "limit_reverse", "penalties"])
    text = [
        f"lambda          {fmt_vector(lam)}",
        f"energy          {payload['energy']}",
        f"limit           {payload['limit']}",
        f"energy_reverse  {payload['energy_reverse']}",
        f"limit_reverse   {payload['limit_reverse']}",
        f"lambda_max      {payload['lambda_max']}",
        f"penalties       {fmt_vector(rep.penalties)}",
        f"generic         {'yes' if gen.generic else 'no'}",
        f"invariant       {'kappa=' + payload['kappa'] + ' futaki=' + payload['futaki'] if rep.kappa is not None else 'no'}",
        f"inequality E>=0 {'holds' if rep.inequality_holds else 'violated'}",
    ]
    _emit(args, "eval", data, payload, rep.warnings, text)
    return EXIT_OK


def cmd_envelope(args) -> int:
    support, data = _read_input(args.file)
    lam = _weights(args.lam, support)
    if not 0 <= args.var <= support.n:
        raise _Exit(EXIT_WEIGHTS, f"variable index {args.var} outside 0..{support.n}")
    lines = phi_lines(support, lam, args.var)
    env = build_envelope(lines)
    rows = []
    for seg in env.segments:
        rows.append(
            {
                "segment_start": fmt(seg.start),
                "segment_end": "inf" if seg.end is None else fmt(seg.end),
                "slope": fmt(seg.slope),
                "value_at_start": fmt(seg.value_at_start),
                "contribution": fmt(seg.contribution),
            }
        )
    penalty = sum((seg.contribution for seg in env.segments), Fraction(0))
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["segment_start", "segment_end", "slope", "contribution"])
            for r in rows:
                writer.writerow([r["segment_start"], r["segment_end"], r["slope"], r["contribution"]])
    payload = {
        "variable": args.var,
        "lambda": _strs(lam),
        "lines": [{"intercept": fmt(ln.intercept), "slope": fmt(ln.slope)} for ln in lines],
        "breakpoints": _strs(env.breakpoints),
        "segments": rows,
        "penalty": fmt(penalty),
    }
    text = [f"phi_{args.var} lines (intercept, slope): " + ", ".join(f"({fmt(l.intercept)}, {fmt(l.slope)})" for l in lines)]
    text.append("start  end  slope  contribution")
    text += [f"{r['segment_start']}  {r['segment_end']}  {r['slope']}  {r['contribution']}" for r in rows]
    text.append(f"penalty {payload['penalty']}")
    _emit(args, "envelope", data, payload, [], text)
    return EXIT_OK


def cmd_check(args) -> int:
    support, data = _read_input(args.file)
    rep = validate_support(support)
    witnesses = [
        {"variable": k, "monomial": j, "exponents": list(support.rows[j])}
        for k, j in enumerate(rep.zero_exponent_witnesses)
    ]
    payload = {
        "valid": True,
        "n": support.n,
        "d": support.d,
        "monomials": len(support),
        "fano": rep.fano,
        "canonical": serialize_support(support),
        "zero_exponent_witnesses": witnesses,
    }
    text = [
        "valid",
        f"n={support.n} d={support.d} monomials={len(support)}",
        f"fano: {'yes (d <= n)' if rep.fano else 'no (d > n)'}",
        f"canonical: {payload['canonical']}",
    ]
    text += [f"Z{w['variable']} absent from monomial {w['monomial']} {fmt_vector(w['exponents'])}" for w in witnesses]
    _emit(args, "check", data, payload, rep.warnings, text)
    return EXIT_OK


def cmd_search(args) -> int:
    support, data = _read_input(args.file)
    warnings = validate_support(support).warnings
    cfg = SearchConfig(
        height=args.height,
        samples=args.samples,
        seed=args.seed,
        refine_rounds=args.refine,
        denominator_cap=args.denominator_cap,
        refine_top=args.refine_top,
        jobs=args.jobs,
    )
    res = search_min(support, cfg)
    payload = {
        "best_lambda": _strs(res.best_lambda),
        "best_score": fmt(res.best_score),
        "evaluations": res.evaluations,
        "violated": res.violated,
        "config": {
            "height": cfg.height,
            "samples": cfg.samples,
            "seed": cfg.seed,
            "refine_rounds": cfg.refine_rounds,
            "denominator_cap": cfg.denominator_cap,
            "refine_top": cfg.refine_top,
        },
        "trace": [{"lambda": _strs(lam), "score": fmt(s)} for lam, s in res.trace],
    }
    if args.float:
        _add_floats(payload, ["best_score"])
    text = [
        f"witness     {fmt_vector(res.best_lambda)}",
        f"score       {payload['best_score']}",
        f"evaluations {res.evaluations}",
        f"violated    {'yes' if res.violated else 'no'}",
    ]
    _emit(args, "search", data, payload, warnings, text)
    return EXIT_VIOLATION if res.violated else EXIT_OK


def cmd_certify(args) -> int:
    support, data = _read_input(args.file)
    warnings = validate_support(support).warnings
    count = subset_count(support)
    print(f"certify: {count} constraint subsets (limit {args.box_limit})", file=sys.stderr)
    try:
        cert = certify_min(support, args.box_limit, jobs=args.jobs)
    except CombinatorialBudgetExceeded as exc:
        raise _Exit(EXIT_BUDGET, f"CombinatorialBudgetExceeded: {exc}") from exc
    violated = cert.minimum < 0
    payload = {
        "minimum": fmt(cert.minimum),
        "witness": _strs(cert.witness),
        "walls_used": list(cert.walls_used),
        "vertex_count": cert.vertex_count,
        "constraint_count": cert.constraint_count,
        "subset_count": cert.subset_count,
        "violated": violated,
    }
    if args.float:
        _add_floats(payload, ["minimum"])
    text = [
        f"minimum   {payload['minimum']}",
        f"witness   {fmt_vector(cert.witness)}",
        f"tight     {', '.join(cert.walls_used)}",
        f"vertices  {cert.vertex_count}",
    ]
    _emit(args, "certify", data, payload, warnings, text)
    return EXIT_VIOLATION if violated else EXIT_OK


def cmd_futaki(args) -> int:
    support, data = _read_input(args.file)
    lam = _weights(args.lam, support)
    rep = report(support, lam)
    if rep.kappa is None:
        distinct = sorted(set(rep.weight_data.w))
        payload = {"invariant": False, "lambda": _strs(lam), "distinct_weights": _strs(distinct)}
        _emit(args, "futaki", data, payload, [], [f"not invariant: monomial weights {fmt_vector(distinct)}"])
        return EXIT_NOT_INVARIANT
    payload = {
        "invariant": True,
        "lambda": _strs(lam),
        "kappa": fmt(rep.kappa),
        "futaki": fmt(rep.futaki),
        "energy": fmt(rep.energy),
        "matches_energy": rep.futaki == rep.energy,
    }
    if args.float:
        _add_floats(payload, ["kappa", "futaki"])
    text = [f"kappa   {payload['kappa']}", f"futaki  {payload['futaki']}", f"energy  {payload['energy']}"]
    _emit(args, "futaki", data, payload, rep.warnings, text)
    return EXIT_OK


# --- parser -------------------------------------------------------------------


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("KSTAB_JOBS", "1")))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kstab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-f", "--file", required=True, help=".poly text, .json support, or - for stdin text")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--float", action="store_true", help="add decimal approximations next to exact values")
    common.add_argument("--jobs", type=int, default=_default_jobs(), help="worker processes (default $KSTAB_JOBS or 1)")

    weights = argparse.ArgumentParser(add_help=False)
    weights.add_argument("--lambda", dest="lam", required=True, help="comma-separated rationals summing to 0")

    p = sub.add_parser("eval", parents=[common, weights], help="evaluate E, L and penalties for one weight vector")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("envelope", parents=[common, weights], help="dump the envelope of one variable")
    p.add_argument("--var", type=int, required=True)
    p.add_argument("--csv", help="write segments to this CSV file")
    p.set_defaults(func=cmd_envelope)

    p = sub.add_parser("check", parents=[common], help="validate the support and report the Fano condition")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("search", parents=[common], help="look for weight vectors with negative energy")
    p.add_argument("--height", type=int, default=1)
    p.add_argument("--samples", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--refine", type=int, default=SearchConfig.refine_rounds, help="pattern-search rounds")
    p.add_argument("--denominator-cap", type=int, default=SearchConfig.denominator_cap)
    p.add_argument("--refine-top", type=int, default=SearchConfig.refine_top)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("certify", parents=[common], help="exact minimum of E over the unit box")
    p.add_argument("--box-limit", type=int, default=DEFAULT_BOX_LIMIT)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("futaki", parents=[common, weights], help="Futaki invariant when X F = kappa F")
    p.set_defaults(func=cmd_futaki)
    return parser


def _glue_lambda(argv: Sequence[str]) -> list[str]:
    # "--lambda -1,2,-1" would be read as an option by argparse.
    out = []
    it = iter(argv)
    for tok in it:
        if tok == "--lambda":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"--lambda={nxt}")
        else:
            out.append(tok)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(_glue_lambda(argv))
    try:
        return args.func(args)
    except _Exit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except SupportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except WeightError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_WEIGHTS
    except NotInvariant as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_INVARIANT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
