"""Replay of proof scripts: actions, expectations and traces."""
from __future__ import annotations

import difflib
import json
import re
import time
from dataclasses import asdict, dataclass, field
from importlib import resources
from typing import Callable, Iterable, List, Optional, Sequence, TextIO

from .algebra import simplify
from .dsl import (
    Apply,
    Environment,
    Expect,
    ParseError,
    Script,
    Step,
    UnknownName,
    parse_rule_file,
    parse_script,
    render_term,
)
from .rules import RewriteFailure
from .strategies import time_limit
from .terms import PLUS, App, Term, equiv_mod_oeps

CORPUS_RULES = ("twoscale.rules", "green.rules", "hypothesis.rules")
CORPUS_PROOF = "gradient.proof"


class ExpectationFailed(AssertionError):
    def __init__(self, step: str, line: int, expected: Term, actual: Term):
        self.step = step
        self.line = line
        self.expected = expected
        self.actual = actual
        self.diff = term_diff(expected, actual)
        super().__init__(f"{step} (line {line}): expectation failed\n{self.diff}")


class StrategyFailed(Exception):
    def __init__(self, step: str, line: int, strategy: str):
        self.step = step
        self.line = line
        self.strategy = strategy
        super().__init__(f"{step} (line {line}): {strategy} failed")


@dataclass
class TraceEvent:
    step: str
    strategy: str
    input: str
    output: str
    fresh: List[int] = field(default_factory=list)
    elapsed: Optional[float] = None

    def to_dict(self, timings: bool = False) -> dict:
        d = asdict(self)
        if not timings:
            d.pop("elapsed")
        return d


@dataclass
class RunResult:
    final: Optional[Term]
    events: List[TraceEvent]
    expectations: int


def _summands(t: Term) -> List[str]:
    if isinstance(t, App) and t.head == PLUS and not t.head_var:
        return [render_term(a) for a in t.args]
    return [render_term(t)]


def term_diff(expected: Term, actual: Term) -> str:
    """Unified diff of the simplified summands, one per line."""
    lines = difflib.unified_diff(
        _summands(simplify(expected)), _summands(simplify(actual)),
        fromfile="expected", tofile="actual", lineterm="",
    )
    return "\n".join(lines)


def run_script(
    script: Script,
    env: Optional[Environment] = None,
    limit: Optional[float] = None,
    on_event: Optional[Callable[[TraceEvent], None]] = None,
) -> RunResult:
    """Execute ``script`` in ``env``; raises on the first failure.

    ``limit`` is a wall-clock budget in seconds for the whole run.
    """
    env = env if env is not None else Environment()
    events: List[TraceEvent] = []
    current: Optional[Term] = None
    label = ""
    checked = 0
    with time_limit(limit):
        for stmt in script.statements:
            where = label or f"line {stmt.line}"
            if isinstance(stmt, Step):
                label = stmt.label
            elif isinstance(stmt, Apply):
                if stmt.term is not None:
                    current = stmt.term
                    env.session.reserve(current)
                if current is None:
                    raise ParseError("apply without a term to rewrite", stmt.line)
                try:
                    strategy = env.strategy(stmt.strategy)
                except UnknownName as exc:
                    raise UnknownName(f"{where} (line {stmt.line}): {exc}") from None
                before = env.session.counter
                started = time.perf_counter()
                try:
                    out = strategy(current)
                except RewriteFailure:
                    raise StrategyFailed(where, stmt.line, str(stmt.strategy)) from None
                event = TraceEvent(
                    where, str(stmt.strategy), render_term(current), render_term(out),
                    list(range(before, env.session.counter)), time.perf_counter() - started,
                )
                events.append(event)
                if on_event is not None:
                    on_event(event)
                current = out
            elif isinstance(stmt, Expect):
                if current is None:
                    raise ParseError("expect before any apply", stmt.line)
                ok = current == stmt.term if stmt.exact else equiv_mod_oeps(simplify(current), simplify(stmt.term))
                if not ok:
                    raise ExpectationFailed(where, stmt.line, stmt.term, current)
                checked += 1
            else:
                env.declare(stmt)
    return RunResult(current, events, checked)


def load_environment(rule_texts: Iterable[str]) -> Environment:
    env = Environment()
    for text in rule_texts:
        parse_rule_file(text, env)
    return env


def corpus_text(name: str) -> str:
    return resources.files("symtrans").joinpath("corpus").joinpath(name).read_text(encoding="utf-8")


def run_gradient_proof(limit: Optional[float] = None, on_event=None) -> RunResult:
    """Replay the bundled gradient proof against the bundled rule packages."""
    env = load_environment(corpus_text(name) for name in CORPUS_RULES)
    return run_script(parse_script(corpus_text(CORPUS_PROOF)), env, limit, on_event)


def format_event(event: TraceEvent, timings: bool = False) -> str:
    lines = [f"[{event.step}] {event.strategy}", f"  in:  {event.input}", f"  out: {event.output}"]
    if event.fresh:
        lines.append("  fresh: " + ", ".join(map(str, event.fresh)))
    if timings and event.elapsed is not None:
        lines.append(f"  elapsed: {event.elapsed * 1000:.3f} ms")
    return "\n".join(lines)


def emit_trace(events: Sequence[TraceEvent], fmt: str, stream: TextIO, timings: bool = False,
               final: Optional[Term] = None, status: str = "ok"):
    """Write ``events`` as ``text`` or ``json``; ``none`` writes nothing."""
    if fmt == "none":
        return
    if fmt == "text":
        for event in events:
            stream.write(format_event(event, timings) + "\n")
        return
    if fmt == "json":
        doc = {
            "status": status,
            "events": [e.to_dict(timings) for e in events],
            "final": render_term(final) if final is not None else None,
        }
        json.dump(doc, stream, indent=2, ensure_ascii=False)
        stream.write("\n")
        return
    raise ValueError(f"unknown trace format {fmt!r}")


_DURATION = re.compile(r"\s*([0-9]*\.?[0-9]+)\s*(us|ms|s|m|h)?\s*\Z")
_UNITS = {"us": 1e-6, "ms": 1e-3, "s": 1.0, "m": 60.0, "h": 3600.0, None: 1.0}


def parse_duration(text: str) -> float:
    """``"1ms"``, ``"2.5s"``, ``"3m"`` or bare seconds, to seconds."""
    m = _DURATION.match(text)
    if m is None:
        raise ValueError(f"bad duration {text!r}")
    return float(m.group(1)) * _UNITS[m.group(2)]
