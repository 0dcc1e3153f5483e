"""Rewrite rules, top rewriting and the generic linearity constructor."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import FrozenSet, Optional, Tuple

from .matching import matches, substitute
from .terms import (
    App,
    MARKER,
    Num,
    OEPS,
    Term,
    Var,
    free_vars,
    make,
    subterms,
)

HOLE = "_"
_TEMPLATE_REF = re.compile(r"[A-Z]\Z")


class IllFormedRule(ValueError):
    pass


class BadTemplate(ValueError):
    pass


class RewriteFailure(Exception):
    """The failure signal of a transformation ("Fail")."""


@dataclass(frozen=True)
class Guard:
    predicate: str
    args: Tuple[str, ...]

    def __str__(self):
        return f"{self.predicate}({', '.join(self.args)})"


@dataclass(frozen=True)
class Rule:
    name: str
    lhs: Term
    rhs: Term
    guard: Optional[Guard] = None
    is_oeps: bool = field(default=False, compare=False)

    @property
    def is_context(self) -> bool:
        return isinstance(self.lhs, Var)

    def __str__(self):
        from .dsl import render_rule

        return render_rule(self)


def has_fresh_marker(t: Term) -> bool:
    return any(
        isinstance(u, App) and u.head == OEPS and u.args == (App(MARKER),)
        for u in subterms(t)
    )


def make_rule(name: str, lhs: Term, rhs: Term, guard: Optional[Guard] = None,
              constants: FrozenSet[str] = frozenset()) -> Rule:
    """Validate and build a rule.

    ``free(rhs)`` must be covered by ``free(lhs)``.  A right-hand-side
    constant spelled as a single capital letter is read as a reference to a
    binding, so it must be bound too, unless listed in ``constants``.  Rules
    whose lhs is a bare variable are contexts for :func:`outer_context` and
    may introduce new variables on the right.
    """
    if isinstance(lhs, Num):
        raise IllFormedRule(f"{name}: left-hand side is a number")
    bound = free_vars(lhs)
    if not isinstance(lhs, Var):
        missing = free_vars(rhs) - bound
        for u in subterms(rhs):
            if (isinstance(u, App) and not u.args and _TEMPLATE_REF.match(u.head)
                    and u.head not in bound and u.head not in constants):
                missing.add(u.head)
        if missing:
            raise IllFormedRule(f"{name}: unbound {', '.join(sorted(missing))} on the right-hand side")
    if guard is not None and not set(guard.args) <= bound:
        raise IllFormedRule(f"{name}: guard {guard} refers to unbound names")
    return Rule(name, lhs, rhs, guard, has_fresh_marker(rhs))


def apply_at_top(rule: Rule, t: Term, session=None) -> Term:
    """Rewrite ``t`` at its root.  Raises :class:`RewriteFailure`.

    With a guard, the first match whose substitution satisfies the guard is
    used; guards are looked up in ``session``.
    """
    for sigma in matches(rule.lhs, t):
        if rule.guard is not None:
            if session is None:
                raise ValueError(f"rule {rule.name} has a guard but no session was given")
            if not session.check_guard(rule.guard, sigma):
                continue
        return substitute(sigma, rule.rhs)
    raise RewriteFailure(rule.name)


def _find_hole(t: Term, path=()):
    found = []
    if isinstance(t, Var) and t.name == HOLE:
        found.append(path)
    elif isinstance(t, App):
        for i, a in enumerate(t.args):
            found.extend(_find_hole(a, path + (i,)))
    return found


def _replace(t: Term, path, new: Term) -> Term:
    if not path:
        return new
    args = list(t.args)
    args[path[0]] = _replace(args[path[0]], path[1:], new)
    return make(t.head, *args, head_var=t.head_var)


def _vars_to_refs(t: Term) -> Term:
    if isinstance(t, Var):
        return App(t.name)
    if isinstance(t, App) and t.args:
        return make(t.head, *(_vars_to_refs(a) for a in t.args))
    return t


def linearity(n: int, op: str, template: Term, name: Optional[str] = None) -> Rule:
    """Additivity rule ``template[op(X, Y)] -> op(template[X], template[Y])``.

    ``template`` holds one anonymous hole, which must be argument ``n``
    (1-based) of its parent application.
    """
    holes = _find_hole(template)
    if len(holes) != 1:
        raise BadTemplate(f"template needs exactly one hole, found {len(holes)}")
    path = holes[0]
    if not path or path[-1] != n - 1:
        raise BadTemplate(f"hole is not argument {n} of its parent")
    taken = free_vars(template)
    x, y = "X", "Y"
    k = 1
    while x in taken or y in taken:
        x, y, k = f"X{k}", f"Y{k}", k + 1
    lhs = _replace(template, path, make(op, Var(x), Var(y)))
    ref = _vars_to_refs(template)
    rhs = make(op, _replace(ref, path, App(x)), _replace(ref, path, App(y)))
    head = template.head if isinstance(template, App) else "term"
    return make_rule(name or f"Linearity_{head}_{n}", lhs, rhs)
