"""Context-sensitive rewriting: inner-context guards and rule-to-rule contexts."""
from __future__ import annotations

from .algebra import simplify
from .matching import contains_match
from .rules import RewriteFailure, Rule
from .strategies import Strategy
from .terms import App, Term, Var, free_vars, make


class BadContext(ValueError):
    pass


class InnerContext(Strategy):
    """Apply ``s`` only to terms having a subterm that matches ``pattern``."""

    def __init__(self, pattern: Term, s: Strategy):
        self.pattern = pattern
        self.s = s

    def __call__(self, t):
        if not contains_match(self.pattern, t):
            raise RewriteFailure("InnerContext")
        return self.s(t)

    def __repr__(self):
        return f"InnerContext({self.pattern}, {self.s!r})"


def _plug(t: Term, hole: str, filler: Term, new_vars, keep_vars: bool) -> Term:
    if isinstance(t, Var):
        if t.name == hole:
            return filler
        return t if keep_vars else App(t.name)
    if isinstance(t, App):
        if not t.args and t.head == hole:
            return filler
        if t.args:
            return make(t.head, *(_plug(a, hole, filler, new_vars, keep_vars) for a in t.args),
                        head_var=t.head_var)
    return t


def outer_context(rule: Rule, context: Rule, name: str = None) -> Rule:
    """Embed both sides of ``rule`` in ``context`` and simplify.

    ``context`` has a bare variable ``X_`` on the left; its right-hand side
    refers to ``X`` and may introduce new pattern variables, which stay
    pattern variables on the new left side and become references on the new
    right side.
    """
    if not isinstance(context.lhs, Var):
        raise BadContext(f"{context.name}: context left-hand side must be a single variable")
    hole = context.lhs.name
    new_vars = free_vars(context.rhs) - {hole}
    clash = new_vars & free_vars(rule.lhs)
    if clash:
        raise BadContext(f"context variables {sorted(clash)} clash with {rule.name}")
    lhs = simplify(_plug(context.rhs, hole, rule.lhs, new_vars, keep_vars=True))
    rhs = simplify(_plug(context.rhs, hole, rule.rhs, new_vars, keep_vars=False))
    return Rule(name or f"{rule.name}_{context.name}", lhs, rhs, rule.guard, rule.is_oeps)
