"""Strategies: deterministic partial transformations of terms.

A strategy is a callable ``Term -> Term`` that raises
:class:`~symtrans.rules.RewriteFailure` when it does not apply.  The
combinators below follow the usual definitions: traversals absorb the
failures of their argument, ``LeftChoice`` and ``Comp`` are defined by
induction on their list, ``Normalizer`` iterates to a fixed point.
"""
from __future__ import annotations

import time
from contextlib import contextmanager
from typing import Callable, Optional, Sequence

from .rules import RewriteFailure, Rule, apply_at_top
from .terms import App, Term, make

__all__ = [
    "Strategy", "Identity", "Fail", "Transform", "IdentityAsFail", "FailAsIdentity",
    "All", "TopDown", "BottomUp", "LeftChoice", "Comp", "Normalizer", "FunctionStrategy",
    "exist_child", "succeeds", "time_limit", "TimeLimitExceeded", "RewriteFailure",
]


class TimeLimitExceeded(Exception):
    pass


_deadline: Optional[float] = None


@contextmanager
def time_limit(seconds: Optional[float]):
    """Abort long-running traversals and normalizations after ``seconds``."""
    global _deadline
    previous = _deadline
    _deadline = None if seconds is None else time.monotonic() + seconds
    try:
        yield
    finally:
        _deadline = previous


def _check_deadline():
    if _deadline is not None and time.monotonic() > _deadline:
        raise TimeLimitExceeded("time limit exceeded")


class Strategy:
    def __call__(self, t: Term) -> Term:
        raise NotImplementedError

    def __repr__(self):
        return type(self).__name__ + "()"


class Identity(Strategy):
    def __call__(self, t):
        return t


class Fail(Strategy):
    def __call__(self, t):
        raise RewriteFailure("Fail")


class Transform(Strategy):
    """Rewriting at the top with one rule."""

    def __init__(self, rule: Rule, session=None):
        self.rule = rule
        self.session = session

    def __call__(self, t):
        return apply_at_top(self.rule, t, self.session)

    def __repr__(self):
        return f"Transform({self.rule.name})"


class FunctionStrategy(Strategy):
    """Wrap a total term function as a strategy that never fails."""

    def __init__(self, fn: Callable[[Term], Term], name: str):
        self.fn = fn
        self.name = name

    def __call__(self, t):
        return self.fn(t)

    def __repr__(self):
        return self.name


class _Unary(Strategy):
    def __init__(self, s: Strategy):
        self.s = s

    def __repr__(self):
        return f"{type(self).__name__}({self.s!r})"


class IdentityAsFail(_Unary):
    def __call__(self, t):
        u = self.s(t)
        if u == t:
            raise RewriteFailure("no progress")
        return u


class FailAsIdentity(_Unary):
    def __call__(self, t):
        try:
            return self.s(t)
        except RewriteFailure:
            return t


def _try(s: Strategy, t: Term) -> Term:
    try:
        return s(t)
    except RewriteFailure:
        return t


def _rebuild(t: App, args) -> Term:
    args = tuple(args)
    if args == t.args:
        return t
    return make(t.head, *args, head_var=t.head_var)


class All(_Unary):
    """Apply to every immediate subterm; failures leave the subterm as is."""

    def __call__(self, t):
        _check_deadline()
        if isinstance(t, App) and t.args:
            return _rebuild(t, (_try(self.s, a) for a in t.args))
        return t


class TopDown(_Unary):
    def __call__(self, t):
        _check_deadline()
        if isinstance(t, App) and t.args:
            try:
                return self.s(t)
            except RewriteFailure:
                return _rebuild(t, (self(a) for a in t.args))
        return _try(self.s, t)


def succeeds(s: Strategy, t: Term) -> bool:
    try:
        s(t)
    except RewriteFailure:
        return False
    return True


def exist_child(s: Strategy, t: Term) -> bool:
    """True iff ``s`` does not fail on some proper subterm of ``t``."""
    if not isinstance(t, App):
        return False
    for a in t.args:
        if succeeds(s, a) or exist_child(s, a):
            return True
    return False


class BottomUp(_Unary):
    def __call__(self, t):
        _check_deadline()
        if exist_child(self.s, t):
            return All(self)(t)
        return _try(self.s, t)


class _Nary(Strategy):
    def __init__(self, strategies: Sequence[Strategy]):
        self.strategies = tuple(strategies)

    def __repr__(self):
        inner = ", ".join(repr(s) for s in self.strategies)
        return f"{type(self).__name__}([{inner}])"


class LeftChoice(_Nary):
    """First member that succeeds; the input itself if none does."""

    def __call__(self, t):
        for s in self.strategies:
            try:
                return s(t)
            except RewriteFailure:
                continue
        return t


class Comp(_Nary):
    def __call__(self, t):
        for s in self.strategies:
            t = s(t)
        return t


class Normalizer(_Unary):
    """Iterate until a fixed point, evaluating the strategy once per round."""

    def __call__(self, t):
        while True:
            _check_deadline()
            u = self.s(t)
            if u == t:
                return t
            t = u
