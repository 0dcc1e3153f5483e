"""Immutable term representation and canonical construction.

Terms are built from three node kinds: :class:`App` (a function symbol, or a
head pattern variable, applied to arguments), :class:`Var` (a pattern
variable) and :class:`Num` (an exact rational).  Every public constructor
returns terms in canonical form: ``plus`` and ``times`` are flattened, their
numeric arguments folded, identity elements dropped, and their arguments
sorted by :func:`sort_key`.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Union

PLUS = "plus"
TIMES = "times"
POW = "pow"
LIST = "list"
OEPS = "Oeps"
MARKER = "FreshIndexMarker"
EPSILON = "epsilon"
INTEGRAL = "Integral"

AC_SYMBOLS = frozenset({PLUS, TIMES})
_IDENTITY = {PLUS: Fraction(0), TIMES: Fraction(1)}


class Term:
    __slots__ = ()

    def __str__(self) -> str:
        from .dsl import render_term

        return render_term(self)

    def __lt__(self, other: "Term") -> bool:
        return sort_key(self) < sort_key(other)


class Num(Term):
    __slots__ = ("value", "_hash")

    def __init__(self, value):
        value = Fraction(value)
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "_hash", hash(("Num", value)))

    def __setattr__(self, name, value):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        return isinstance(other, Num) and self.value == other.value

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Num({self.value})"


class Var(Term):
    """Pattern variable.  ``name`` excludes the trailing underscore."""

    __slots__ = ("name", "_hash")

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_hash", hash(("Var", name)))

    def __setattr__(self, name, value):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        return isinstance(other, Var) and self.name == other.name

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Var({self.name!r})"


class App(Term):
    """Application node.  Arity 0 is a constant.

    ``head_var`` marks a head-position pattern variable (``f_(x)`` in source).
    The raw constructor does not canonicalize; use :func:`make` for that.
    """

    __slots__ = ("head", "args", "head_var", "_hash", "_key")

    def __init__(self, head: str, args: Iterable[Term] = (), head_var: bool = False):
        args = tuple(args)
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "head_var", head_var)
        object.__setattr__(self, "_hash", hash(("App", head, head_var, args)))
        object.__setattr__(self, "_key", None)

    def __setattr__(self, name, value):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, App)
            and self._hash == other._hash
            and self.head == other.head
            and self.head_var == other.head_var
            and self.args == other.args
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        prefix = "?" if self.head_var else ""
        if not self.args:
            return f"App({prefix}{self.head})"
        return f"App({prefix}{self.head}, {list(self.args)!r})"


TermLike = Union[Term, int, Fraction, str]


def sort_key(t: Term):
    """Total structural order: numbers, then applications, then variables.

    Applications compare by head name, head-variable flag, arity, then
    arguments left to right.
    """
    if isinstance(t, Num):
        return (0, t.value)
    if isinstance(t, Var):
        return (2, t.name)
    key = t._key
    if key is None:
        key = (1, t.head, t.head_var, len(t.args), tuple(sort_key(a) for a in t.args))
        object.__setattr__(t, "_key", key)
    return key


def _coerce(x: TermLike) -> Term:
    if isinstance(x, Term):
        return x
    if isinstance(x, (int, Fraction)):
        return Num(x)
    if isinstance(x, str):
        return sym(x)
    raise TypeError(f"cannot convert {x!r} to a term")


def num(value) -> Num:
    return Num(value)


def var(name: str) -> Var:
    return Var(name[:-1] if name.endswith("_") else name)


def sym(name: str) -> App:
    return App(name)


def make(head: str, *args: TermLike, head_var: bool = False) -> Term:
    """Build ``head(*args)`` in canonical form (arguments assumed canonical)."""
    args = tuple(_coerce(a) for a in args)
    if head_var:
        return App(head, args, head_var=True)
    if head in AC_SYMBOLS:
        return _make_ac(head, args)
    if head == POW and len(args) == 2:
        base, exp = args
        if isinstance(base, Num) and isinstance(exp, Num) and exp.value.denominator == 1:
            if not (base.value == 0 and exp.value < 0):
                return Num(base.value ** int(exp.value))
    return App(head, args)


def _make_ac(head: str, args: tuple) -> Term:
    flat = []
    for a in args:
        if isinstance(a, App) and a.head == head and not a.head_var:
            flat.extend(a.args)
        else:
            flat.append(a)
    acc = _IDENTITY[head]
    rest = []
    for a in flat:
        if isinstance(a, Num):
            acc = acc + a.value if head == PLUS else acc * a.value
        else:
            rest.append(a)
    if acc != _IDENTITY[head]:
        rest.append(Num(acc))
    if not rest:
        return Num(_IDENTITY[head])
    if len(rest) == 1:
        return rest[0]
    rest.sort(key=sort_key)
    return App(head, rest)


def plus(*args: TermLike) -> Term:
    return make(PLUS, *args)


def times(*args: TermLike) -> Term:
    return make(TIMES, *args)


def power(base: TermLike, exp: TermLike) -> Term:
    return make(POW, base, exp)


def neg(t: TermLike) -> Term:
    return times(-1, t)


def oeps(index=None) -> Term:
    """``Oeps(index)``; with no index, the fresh-generation marker."""
    if index is None:
        return App(OEPS, (App(MARKER),))
    return App(OEPS, (_coerce(index),))


FRESH_OEPS = oeps()


def canonicalize(t: Term) -> Term:
    """Rebuild ``t`` bottom-up through :func:`make`.  Idempotent."""
    if not isinstance(t, App) or not t.args:
        return t
    return make(t.head, *(canonicalize(a) for a in t.args), head_var=t.head_var)


def equal(t1: Term, t2: Term) -> bool:
    return canonicalize(t1) == canonicalize(t2)


def is_oeps(t: Term) -> bool:
    return isinstance(t, App) and t.head == OEPS and not t.head_var and len(t.args) == 1


def erase_oeps_indexes(t: Term) -> Term:
    """Replace every ``Oeps`` index (concrete or marker) by 0."""
    if is_oeps(t):
        return App(OEPS, (Num(0),))
    if isinstance(t, App) and t.args:
        return make(t.head, *(erase_oeps_indexes(a) for a in t.args), head_var=t.head_var)
    return t


def equiv_mod_oeps(t1: Term, t2: Term) -> bool:
    return erase_oeps_indexes(canonicalize(t1)) == erase_oeps_indexes(canonicalize(t2))


def symbol_count(t: Term) -> int:
    if isinstance(t, App):
        return 1 + sum(symbol_count(a) for a in t.args)
    return 1


def subterms(t: Term) -> Iterator[Term]:
    """Pre-order traversal, ``t`` first."""
    stack = [t]
    while stack:
        u = stack.pop()
        yield u
        if isinstance(u, App):
            stack.extend(reversed(u.args))


def free_vars(t: Term) -> set:
    """Names of pattern variables, including head-position ones."""
    out = set()
    for u in subterms(t):
        if isinstance(u, Var):
            out.add(u.name)
        elif isinstance(u, App) and u.head_var:
            out.add(u.head)
    return out


def leaf_symbols(t: Term) -> set:
    return {u.head for u in subterms(t) if isinstance(u, App) and not u.args}


def is_closed(t: Term) -> bool:
    return not free_vars(t)
