"""Syntactic matching modulo AC flattening, and substitution."""
from __future__ import annotations

from typing import Dict, Iterator, Mapping, Optional

from .terms import AC_SYMBOLS, App, Num, Term, Var, make, subterms

Substitution = Dict[str, Term]


class NoMatch(Exception):
    pass


class UnboundVariable(Exception):
    pass


def matches(pattern: Term, subject: Term, sigma: Optional[Mapping] = None) -> Iterator[Substitution]:
    """Yield every solution under the fixed enumeration order.

    Inside an AC node the pattern arguments are canonically sorted, so a
    pattern variable (if any) sits last.  That trailing variable is the
    remainder: the other pattern arguments each take one subject argument
    (tried in increasing subject position) and the remainder absorbs what is
    left, as an AC node, a single argument, or the identity element when
    nothing is left.
    """
    yield from _match(pattern, subject, dict(sigma or {}))


def match(pattern: Term, subject: Term) -> Substitution:
    for sigma in _match(pattern, subject, {}):
        return sigma
    raise NoMatch(f"{pattern} does not match {subject}")


def try_match(pattern: Term, subject: Term) -> Optional[Substitution]:
    for sigma in _match(pattern, subject, {}):
        return sigma
    return None


def _bind(name: str, value: Term, sigma: Substitution) -> Iterator[Substitution]:
    bound = sigma.get(name)
    if bound is None:
        out = dict(sigma)
        out[name] = value
        yield out
    elif bound == value:
        yield sigma


def _match(p: Term, s: Term, sigma: Substitution) -> Iterator[Substitution]:
    if isinstance(p, Var):
        yield from _bind(p.name, s, sigma)
        return
    if isinstance(p, Num):
        if p == s:
            yield sigma
        return
    if not isinstance(s, App):
        return
    if p.head_var:
        if s.head_var or len(p.args) != len(s.args) or not s.args:
            return
        for sigma1 in _bind(p.head, App(s.head), sigma):
            yield from _match_seq(p.args, s.args, 0, sigma1)
        return
    if p.head != s.head or s.head_var:
        return
    if p.head in AC_SYMBOLS:
        yield from _match_ac(p.head, p.args, s.args, sigma)
    elif len(p.args) == len(s.args):
        yield from _match_seq(p.args, s.args, 0, sigma)


def _match_seq(pargs, sargs, i, sigma):
    if i == len(pargs):
        yield sigma
        return
    for sigma1 in _match(pargs[i], sargs[i], sigma):
        yield from _match_seq(pargs, sargs, i + 1, sigma1)


def _match_ac(head, pargs, sargs, sigma):
    if pargs and isinstance(pargs[-1], Var):
        fixed, rest = pargs[:-1], pargs[-1]
    else:
        fixed, rest = pargs, None
    if len(fixed) > len(sargs):
        return
    if rest is None and len(fixed) != len(sargs):
        return
    used = [False] * len(sargs)

    def assign(i, sigma):
        if i == len(fixed):
            if rest is None:
                yield sigma
            else:
                remaining = [a for a, u in zip(sargs, used) if not u]
                yield from _bind(rest.name, make(head, *remaining), sigma)
            return
        for j, a in enumerate(sargs):
            if used[j]:
                continue
            used[j] = True
            for sigma1 in _match(fixed[i], a, sigma):
                yield from assign(i + 1, sigma1)
            used[j] = False

    yield from assign(0, sigma)


def substitute(sigma: Mapping[str, Term], t: Term) -> Term:
    """Apply ``sigma`` to ``t`` and canonicalize.

    Besides pattern variables, constants whose name is a binding name are
    replaced (the right-hand-side template convention), and an application
    whose head names a bound symbol takes that symbol as its head.
    """
    if isinstance(t, Var):
        try:
            return sigma[t.name]
        except KeyError:
            raise UnboundVariable(t.name) from None
    if isinstance(t, Num):
        return t
    if not t.args:
        return sigma.get(t.head, t)
    args = [substitute(sigma, a) for a in t.args]
    head = t.head
    if t.head_var or head in sigma:
        bound = sigma.get(head)
        if bound is None:
            raise UnboundVariable(head)
        if isinstance(bound, App) and not bound.args and not bound.head_var:
            head = bound.head
        elif t.head_var:
            raise UnboundVariable(f"{head} is not bound to a symbol")
    return make(head, *args)


def contains_match(pattern: Term, subject: Term) -> bool:
    return any(try_match(pattern, u) is not None for u in subterms(subject))
