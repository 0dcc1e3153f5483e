"""``st``: replay proof scripts and apply strategies from the command line.

Exit status is 0 on success, 1 when an expectation or strategy fails (or the
time limit runs out) and 2 on parse or usage errors.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from .contextual import BadContext
from .convergence import Session
from .dsl import Environment, ParseError, UnknownName, parse_rule_file, parse_script, parse_strategy, parse_term
from .rules import BadTemplate, IllFormedRule, RewriteFailure
from .runner import (
    CORPUS_PROOF,
    CORPUS_RULES,
    ExpectationFailed,
    StrategyFailed,
    corpus_text,
    emit_trace,
    parse_duration,
    run_script,
)
from .strategies import TimeLimitExceeded, time_limit
from .terms import Term

_USAGE_ERRORS = (ParseError, UnknownName, IllFormedRule, BadTemplate, BadContext, OSError, UnicodeDecodeError)


def _duration(text: str) -> float:
    try:
        return parse_duration(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="st", description="Strategy-driven term rewriting.")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="replay a .proof script")
    run.add_argument("proof", help="proof script (.proof)")
    run.add_argument("--rules", nargs="+", default=[], metavar="FILE", help="rule packages (.rules)")
    _common(run)

    grad = sub.add_parser("gradient", help="replay the bundled gradient proof")
    _common(grad)

    ap = sub.add_parser("apply", help="run one strategy on one term")
    ap.add_argument("--rules", action="append", default=[], metavar="FILE")
    ap.add_argument("--strategy", required=True)
    ap.add_argument("--term", required=True)
    ap.add_argument("--time-limit", type=_duration, default=None, metavar="DUR")
    return p


def _common(p):
    p.add_argument("--trace", choices=("none", "text", "json"), default="none")
    p.add_argument("--time-limit", type=_duration, default=None, metavar="DUR",
                   help="wall-clock budget, e.g. 500ms or 2s")
    p.add_argument("--timings", action="store_true", help="include elapsed times in the trace")


def _replay(rule_texts: List[str], proof_text: str, args, out) -> int:
    env = Environment()
    for text in rule_texts:
        parse_rule_file(text, env)
    script = parse_script(proof_text)
    events = []
    final: Optional[Term] = None
    status = "ok"
    try:
        result = run_script(script, env, args.time_limit, events.append)
        final = result.final
    except (ExpectationFailed, StrategyFailed, TimeLimitExceeded) as exc:
        status = "failed"
        emit_trace(events, args.trace, out, args.timings, None, status)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    emit_trace(events, args.trace, out, args.timings, final, status)
    if args.trace != "json":
        print(f"ok: {result.expectations} expectation(s) passed", file=out)
        if final is not None:
            print(final, file=out)
    return 0


def _apply(args, out) -> int:
    env = Environment(Session())
    for path in args.rules:
        parse_rule_file(Path(path).read_text(encoding="utf-8"), env)
    strategy = env.strategy(parse_strategy(args.strategy))
    term = parse_term(args.term)
    env.session.reserve(term)
    try:
        with time_limit(args.time_limit):
            result = strategy(term)
    except RewriteFailure:
        print("Fail", file=out)
        return 1
    except TimeLimitExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(result, file=out)
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    args = _parser().parse_args(argv)
    out = sys.stdout
    try:
        if args.command == "apply":
            return _apply(args, out)
        if args.command == "gradient":
            return _replay([corpus_text(n) for n in CORPUS_RULES], corpus_text(CORPUS_PROOF), args, out)
        rules = [Path(p).read_text(encoding="utf-8") for p in args.rules]
        return _replay(rules, Path(args.proof).read_text(encoding="utf-8"), args, out)
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
