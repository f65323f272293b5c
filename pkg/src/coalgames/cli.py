"""Command-line front end.

Exit codes: 0 success / property holds, 1 property fails or the schema has
defects, 2 usage, parse or I/O errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import auction, coinduct, deviation, fixpoint
from .document import DocumentError, bundled_names, load
from .schema import Kind, SchemaError, as_fraction, validate
from .unfold import to_dot, unfold

OK, NEGATIVE, USAGE = 0, 1, 2
DEFAULT_DEPTH_CAP = 16


class UsageError(Exception):
    pass


class _Exit(Exception):
    def __init__(self, code: int):
        self.code = code


def _emit(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _params(pairs: Sequence[str] | None) -> dict[str, str]:
    out = {}
    for pair in pairs or ():
        name, sep, value = pair.partition("=")
        if not sep or not name:
            raise UsageError(f"--param expects NAME=VALUE, got {pair!r}")
        out[name] = value
    return out


def _load(args, require_valid: bool = True):
    system = load(args.file, _params(args.param))
    if require_valid:
        report = validate(system)
        if not report.ok:
            for defect in report.defects:
                print(defect, file=sys.stderr)
            raise _Exit(NEGATIVE)
    return system


def _load_profile(args):
    system = _load(args)
    if system.kind is not Kind.PROFILE:
        raise UsageError(f"{args.file} is a game, this command needs a strategy profile")
    return system


def cmd_validate(args) -> int:
    system = _load(args, require_valid=False)
    report = validate(system)
    for defect in report.defects:
        print(defect)
    if report.ok:
        print(f"ok: {system.kind.value} with {len(system)} variables, root {system.root}")
        return OK
    return NEGATIVE


def _violation(v: fixpoint.PEViolation | None):
    if v is None:
        return None
    return {
        "var": v.var,
        "agent": v.agent,
        "reason": v.reason,
        "chosen": None if v.chosen is None else str(v.chosen),
        "alternative": None if v.alternative is None else str(v.alternative),
        "index": v.index,
    }


def cmd_check(args) -> int:
    system = _load_profile(args)
    predicate = args.predicate.upper()
    if args.var is not None and args.var not in system:
        raise UsageError(f"no variable {args.var}")
    if args.method == "fixpoint":
        var = args.var or system.root
        check = {
            "WC": fixpoint.weakly_convergent,
            "SC": fixpoint.strongly_convergent,
            "PE": fixpoint.pe,
            "SPE": fixpoint.spe,
        }[predicate]
        verdict = check(system, var)
        payload = {"predicate": args.predicate, "method": "fixpoint", "var": var, "verdict": verdict}
        if predicate == "PE":
            payload["violation"] = _violation(fixpoint.pe_violation(system, var))
        elif predicate == "SPE":
            payload["violation"] = _violation(fixpoint.spe_violation(system, var))
        _emit(payload)
        return OK if verdict else NEGATIVE

    if args.depth is not None:
        if args.depth < 1:
            raise UsageError("--depth must be at least 1")
        cert = coinduct.certify(system, predicate, args.depth)
        depth_used = args.depth if cert.certified else None
    else:
        depth_used = coinduct.minimal_depth(system, predicate, DEFAULT_DEPTH_CAP)
        cert = coinduct.certify(system, predicate, depth_used or DEFAULT_DEPTH_CAP)
    reason = cert.reason
    _emit(
        {
            "predicate": args.predicate,
            "method": "coinduction",
            "verdict": cert.verdict,
            "conclusion": cert.conclusion,
            "depth": cert.depth,
            "depth_used": depth_used,
            "per_variable": {var: str(v) for var, v in cert.per_variable.items()},
            "reason": None if reason is None else {"var": reason[0], "value": str(reason[1])},
        }
    )
    return OK if cert.certified else NEGATIVE


def cmd_unfold(args) -> int:
    system = _load(args)
    if args.depth < 0:
        raise UsageError("--depth must be nonnegative")
    if args.var is not None and args.var not in system:
        raise UsageError(f"no variable {args.var}")
    text = to_dot(unfold(system, args.var, args.depth))
    if args.dot in (None, "-"):
        sys.stdout.write(text)
    else:
        try:
            Path(args.dot).write_bytes(text.encode("utf-8"))
        except OSError as exc:
            raise DocumentError(f"cannot write {args.dot}: {exc.strerror}") from None
    return OK


def cmd_deviations(args) -> int:
    system = _load_profile(args)
    if args.depth < 1:
        raise UsageError("--depth must be at least 1")
    rows = []
    all_dominated = True
    for d in deviation.enumerate_deviations(system, args.depth):
        try:
            dominated = deviation.dominates(system, d)
        except deviation.DivergentComparison:
            dominated = None
        all_dominated &= bool(dominated)
        rows.append({**d.as_dict(), "dominated": dominated})
    if args.format == "table":
        print(f"{'address':<20} {'flip':<6} dominated")
        for row in rows:
            address = "".join(row["address"]) or "(root)"
            flip = f"{row['original']}->{row['flipped']}"
            dominated = "divergent" if row["dominated"] is None else str(row["dominated"]).lower()
            print(f"{address:<20} {flip:<6} {dominated}")
    else:
        _emit({"depth": args.depth, "deviations": rows, "all_dominated": all_dominated})
    return OK if all_dominated else NEGATIVE


def cmd_principle(args) -> int:
    system = _load_profile(args)
    try:
        report = deviation.one_deviation_principle(system)
    except deviation.NotStronglyConvergent as exc:
        print(f"error: {exc}", file=sys.stderr)
        _emit({"error": "NotStronglyConvergent", "var": exc.var})
        return NEGATIVE
    _emit(report.as_dict())
    return OK if report.agree else NEGATIVE


def cmd_characterize(args) -> int:
    try:
        r = as_fraction(args.r)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"--r: {exc}") from None
    patterns = auction.characterize(r, args.preperiod, args.period)
    if args.format == "table":
        print(f"r = {r}: {len(patterns)} subgame perfect pattern(s)")
        for pattern in patterns:
            print(f"  {pattern}")
    else:
        _emit(
            {
                "r": str(r),
                "preperiod": args.preperiod,
                "period": args.period,
                "spe_patterns": [p.as_dict() for p in patterns],
            }
        )
    return OK


def cmd_features(args) -> int:
    system = _load(args)
    report = auction.check_features(system, strict1=args.strict1)
    _emit(report.as_dict())
    return OK if report.feature1 and report.feature2 else NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coalgames",
        description="Analyse corecursively defined games and strategy profiles.",
        epilog="FILE may be a path or @NAME for a bundled schema: " + ", ".join(bundled_names()),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def with_file(p):
        p.add_argument("file", metavar="FILE")
        p.add_argument("--param", action="append", metavar="NAME=VALUE", help="override a document parameter")
        return p

    p = with_file(sub.add_parser("validate", help="check a schema file for defects"))
    p.set_defaults(func=cmd_validate)

    p = with_file(sub.add_parser("check", help="decide WC/SC/PE/SPE"))
    p.add_argument("--predicate", choices=["wc", "sc", "pe", "spe"], required=True)
    p.add_argument("--method", choices=["fixpoint", "coinduction"], default="fixpoint")
    p.add_argument("--depth", type=int, help="unfolding depth for coinduction (default: search)")
    p.add_argument("--var", help="variable to evaluate at (fixpoint method; default root)")
    p.set_defaults(func=cmd_check)

    p = with_file(sub.add_parser("unfold", help="render a finite unfolding as DOT"))
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--dot", help="output file (default stdout)")
    p.add_argument("--var", help="variable to unfold (default root)")
    p.set_defaults(func=cmd_unfold)

    p = with_file(sub.add_parser("deviations", help="list one-deviations and dominance"))
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--format", choices=["json", "table"], default="json")
    p.set_defaults(func=cmd_deviations)

    p = with_file(sub.add_parser("principle", help="check the one-deviation principle"))
    p.set_defaults(func=cmd_principle)

    p = sub.add_parser("characterize", help="enumerate SPE stop/continue patterns of the dollar auction")
    p.add_argument("--r", required=True, help="prize, as p/q")
    p.add_argument("--preperiod", type=int, default=2, help="max preperiod length (1..4)")
    p.add_argument("--period", type=int, default=2, help="max period length (1..4)")
    p.add_argument("--format", choices=["json", "table"], default="json")
    p.set_defaults(func=cmd_characterize)

    p = with_file(sub.add_parser("features", help="check the two escalation features of a game"))
    p.add_argument("--strict1", action="store_true", help="require strict preference in feature 1")
    p.set_defaults(func=cmd_features)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        return args.func(args)
    except _Exit as exc:
        return exc.code
    except (UsageError, DocumentError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
