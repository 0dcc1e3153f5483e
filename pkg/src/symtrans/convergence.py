"""The O(epsilon) calculus.

Each occurrence of O(epsilon) is a distinct function, so it is written
``Oeps(i)`` with an index drawn from a per-session counter.  Rules declare
fresh occurrences with the marker ``Oeps(FreshIndexMarker)``; the marker is
only replaced when the rule is actually applied (see :func:`lift_oeps_rule`).
"""
from __future__ import annotations

from typing import Callable, Dict, Iterable, List

from .matching import Substitution
from .rules import Guard, RewriteFailure, Rule, make_rule
from .strategies import Comp, IdentityAsFail, LeftChoice, Normalizer, Strategy, TopDown, Transform
from .terms import (
    EPSILON,
    FRESH_OEPS,
    INTEGRAL,
    Num,
    Term,
    Var,
    is_oeps,
    make,
    oeps,
    plus,
    subterms,
    times,
)


class Session:
    """Mutable rewriting context: fresh-index counter, bounded symbols, guards.

    Not thread-safe; use one session per thread.
    """

    def __init__(self, bounded: Iterable[str] = ()):
        self.counter = 0
        self.bounded = set()
        self.guards: Dict[str, Callable] = {"bounded": lambda session, z: session.is_bounded(z)}
        self.observers: List[Callable] = []
        self.declare_bounded(bounded)

    def declare_bounded(self, names: Iterable[str]):
        for name in names:
            if name == EPSILON:
                raise ValueError("epsilon cannot be declared bounded")
            self.bounded.add(name)

    def fresh_index(self) -> int:
        i = self.counter
        self.counter += 1
        return i

    def reserve(self, t: Term):
        """Move the counter past every concrete index already present in ``t``."""
        used = oeps_indexes(t)
        if used:
            self.counter = max(self.counter, max(used) + 1)

    def is_bounded(self, z: Term) -> bool:
        return is_bounded(self, z)

    def check_guard(self, guard: Guard, sigma: Substitution) -> bool:
        try:
            predicate = self.guards[guard.predicate]
        except KeyError:
            raise KeyError(f"unknown guard predicate {guard.predicate!r}") from None
        return bool(predicate(self, *(sigma[a] for a in guard.args)))

    def notify(self, rule: Rule, before: Term, after: Term):
        for observer in self.observers:
            observer(rule, before, after)


def fresh_index(session: Session) -> int:
    return session.fresh_index()


def is_bounded(session: Session, z: Term) -> bool:
    """Leaf-closure boundedness: every leaf is a number, an ``Oeps`` or declared.

    ``Oeps`` subtrees are not inspected.  Any ``epsilon`` makes the term
    unbounded, including its negative powers.
    """
    stack = [z]
    while stack:
        u = stack.pop()
        if isinstance(u, Num) or is_oeps(u):
            continue
        if isinstance(u, Var) or u.head_var:
            return False
        if not u.args:
            if u.head == EPSILON or u.head not in session.bounded:
                return False
            continue
        stack.extend(u.args)
    return True


class EvalFresh(Strategy):
    """``Oeps(FreshIndexMarker) -> Oeps(<fresh index>)`` at the top."""

    def __init__(self, session: Session):
        self.session = session

    def __call__(self, t):
        if t != FRESH_OEPS:
            raise RewriteFailure("EvalRule")
        return oeps(self.session.fresh_index())

    def __repr__(self):
        return "EvalRule"


def eval_fresh(session: Session) -> Strategy:
    return EvalFresh(session)


class LiftedRule(Strategy):
    """``Comp([Transform(r), TopDown(EvalRule)])`` for an O(epsilon)-rule."""

    def __init__(self, session: Session, rule: Rule):
        self.rule = rule
        self.session = session
        self._inner = Comp([Transform(rule, session), TopDown(EvalFresh(session))])

    def __call__(self, t):
        out = self._inner(t)
        if self.session.observers:
            self.session.notify(self.rule, t, out)
        return out

    def __repr__(self):
        return f"Transform({self.rule.name})"


def lift_oeps_rule(session: Session, rule: Rule) -> Strategy:
    if not rule.is_oeps:
        raise ValueError(f"{rule.name} does not generate O(epsilon) terms")
    return LiftedRule(session, rule)


def transform(rule: Rule, session: Session = None) -> Strategy:
    """``Transform(rule)``, lifted automatically for O(epsilon)-rules."""
    if rule.is_oeps:
        if session is None:
            raise ValueError(f"{rule.name} generates O(epsilon) terms and needs a session")
        return lift_oeps_rule(session, rule)
    return Transform(rule, session)


_I, _J, _R, _D, _M, _Z = (Var(n) for n in "IJRDMZ")

NEG_OEPS = make_rule("NegOeps", times(-1, oeps(_I)), FRESH_OEPS)
SUM_OEPS = make_rule("SumOeps", plus(oeps(_I), oeps(_J), _R), plus(FRESH_OEPS, make("R")))
INTEGRAL_OEPS = make_rule("IntegralOeps", make(INTEGRAL, _D, oeps(_I), _M), FRESH_OEPS)
BOUNDED_TIMES_OEPS = make_rule(
    "BoundedTimesOeps", times(_Z, oeps(_I)), FRESH_OEPS, guard=Guard("bounded", ("Z",))
)
CONVERGENCE_RULES = (NEG_OEPS, SUM_OEPS, INTEGRAL_OEPS, BOUNDED_TIMES_OEPS)


def convergence_rules(session: Session) -> List[Strategy]:
    return [lift_oeps_rule(session, r) for r in CONVERGENCE_RULES]


class ConvergenceStrategy(Strategy):
    """Normalize with the four convergence rules, rewriting anywhere.

    ``LeftChoice`` never fails, so it is wrapped in ``IdentityAsFail`` to let
    ``TopDown`` descend past positions where no rule applies.
    """

    def __init__(self, session: Session):
        self.session = session
        self.step = TopDown(IdentityAsFail(LeftChoice(convergence_rules(session))))
        self._inner = Normalizer(self.step)

    def __call__(self, t):
        return self._inner(t)

    def __repr__(self):
        return "ConvergenceStrategy"


def convergence_strategy(session: Session) -> Strategy:
    return ConvergenceStrategy(session)


def oeps_indexes(t: Term) -> List[int]:
    return [int(u.args[0].value) for u in subterms(t)
            if is_oeps(u) and isinstance(u.args[0], Num) and u.args[0].value.denominator == 1]
