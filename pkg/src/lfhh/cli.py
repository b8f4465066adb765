"""Command-line entry points.

Exit codes:
  check     0 derivable, 1 not derivable, 2 error
  encode    0 ok, 2 error
  prove     0 proved, 1 not proved, 3 non-pattern problem, 2 error
  difftest  0 no unsound mismatches, 4 mismatches found, 2 error
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import erasure, harness, kernel
from .encoding import EncodingError, encode_signature, judgment_to_goal
from .parser import ParseError, parse_judgment, parse_signature
from .printer import show_formula, show_lf, show_program
from .prover import (
    Exhausted, Incomplete, Proved, replay_trace, solve, trace_metavars,
    trace_to_json,
)
from .syntax import EMPTY_CONTEXT

EXIT_OK, EXIT_NO, EXIT_ERROR, EXIT_NON_PATTERN, EXIT_MISMATCH = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _load_signature(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from e
    sig = parse_signature(text)
    res = kernel.check_signature(sig)
    if not isinstance(res, kernel.Derivable):
        raise UsageError(f"{path}: ill-formed signature: {res.reason}")
    return sig


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_check(args) -> int:
    sig = _load_signature(args.signature)
    m, a = parse_judgment(args.judgment, sig)
    fam = kernel.check_family(sig, EMPTY_CONTEXT, a)
    if not isinstance(fam, kernel.Ok) or fam.value != kernel.TYPE:
        raise UsageError(f"classifier {show_lf(a)} is not a type")
    res = kernel.check_object(sig, EMPTY_CONTEXT, m, a, args.conversion)
    if isinstance(res, kernel.Derivable):
        print(f"Derivable: {show_lf(m)} : {show_lf(a)}")
        return EXIT_OK
    r = res.reason
    print(f"NotDerivable: {r.kind}: {r.message}")
    if r.pinpoint:
        print(f"  mismatch: {r.pinpoint[1]} vs {r.pinpoint[0]}")
    if r.location:
        print(f"  at: {'/'.join(r.location)}")
    return EXIT_NO


def cmd_encode(args) -> int:
    sig = _load_signature(args.signature)
    prog = encode_signature(sig, checked=True)
    reflected = erasure.reflect_signature(sig) if args.emit_reflected else None
    _write(show_program(prog, reflected), args.output)
    return EXIT_OK


def cmd_prove(args) -> int:
    sig = _load_signature(args.signature)
    m, a = parse_judgment(args.judgment, sig)
    prog = encode_signature(sig, checked=True)
    goal = judgment_to_goal(sig, m, a)
    res = solve(prog, goal, args.depth)
    print(f"goal: {show_formula(goal)}")
    if isinstance(res, Proved):
        ok = replay_trace(prog, goal, res.trace)
        print(f"Proved at depth {args.depth} ({res.trace.backchains()} backchain steps); "
              f"trace replays: {'yes' if ok else 'NO'}")
        if args.trace:
            payload = {
                "schema": 1,
                "goal": show_formula(goal),
                "result": "Proved",
                "depth": args.depth,
                "replayed": ok,
                "metavars": {k: str(v) for k, v in trace_metavars(res.trace).items()},
                "trace": trace_to_json(res.trace),
            }
            Path(args.trace).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        return EXIT_OK
    if isinstance(res, Incomplete):
        print(f"Incomplete: non-pattern unification problem ({res.reason})")
        return EXIT_NON_PATTERN
    if isinstance(res, Exhausted):
        print(f"Exhausted: no proof within depth {res.depth}")
    else:
        print("FailedNoProof: search space exhausted")
    return EXIT_NO


def cmd_difftest(args) -> int:
    sig = _load_signature(args.signature)
    cfg = harness.CampaignConfig(sig, args.max_size, args.max_index_size, args.depth_mult,
                                 args.jobs)
    report = harness.run_campaign(cfg)
    if args.format == "json":
        text = json.dumps(harness.report_to_json(report), indent=2) + "\n"
    else:
        text = harness.report_to_text(report)
    _write(text, args.output)
    if args.figure:
        from .report import plot_campaign
        plot_campaign(report, args.figure)
    return EXIT_MISMATCH if report.mismatches else EXIT_OK


def _positive(s: str) -> int:
    n = int(s)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lfhh", description="LF kernel, HH encoding and prover")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="decide an LF typing judgment")
    c.add_argument("signature")
    c.add_argument("--judgment", "-j", required=True)
    c.add_argument("--conversion", choices=[kernel.BETA_ETA, kernel.BETA], default=kernel.BETA_ETA)
    c.set_defaults(func=cmd_check)

    e = sub.add_parser("encode", help="print the encoded HH program")
    e.add_argument("signature")
    e.add_argument("-o", "--output")
    e.add_argument("--emit-reflected", action="store_true",
                   help="also print the reflected simply typed constants")
    e.set_defaults(func=cmd_encode)

    pr = sub.add_parser("prove", help="search for a proof of an encoded judgment")
    pr.add_argument("signature")
    pr.add_argument("--judgment", "-j", required=True)
    pr.add_argument("--depth", type=int, required=True)
    pr.add_argument("--trace", help="write the proof trace as JSON")
    pr.set_defaults(func=cmd_prove)

    d = sub.add_parser("difftest", help="cross-check kernel and encoded prover")
    d.add_argument("signature")
    d.add_argument("--max-size", type=_positive, required=True)
    d.add_argument("--depth-mult", type=_positive, default=4)
    d.add_argument("--max-index-size", type=_positive, default=1)
    d.add_argument("--format", choices=["json", "text"], default="text")
    d.add_argument("--jobs", type=_positive, default=1)
    d.add_argument("-o", "--output")
    d.add_argument("--figure", help="render classification counts per size to this image file")
    d.set_defaults(func=cmd_difftest)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERROR if e.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "prove" and args.depth < 0:
        print("error: --depth must be non-negative", file=sys.stderr)
        return EXIT_ERROR
    try:
        return args.func(args)
    except (ParseError, UsageError, EncodingError, erasure.ErasureError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
