"""Independent oracles and random generators shared by the tests.

The brute-force matcher does not reuse any of the library's matching code:
at an AC node it tries every way of distributing the subject arguments over
the pattern arguments (a pattern argument may receive zero, one or several
of them) and keeps the substitutions that reproduce the subject.
"""
from __future__ import annotations

import itertools
import random
from fractions import Fraction

from symtrans.matching import substitute
from symtrans.rules import make_rule
from symtrans.strategies import (
    All,
    BottomUp,
    Comp,
    Fail,
    FailAsIdentity,
    Identity,
    IdentityAsFail,
    LeftChoice,
    Normalizer,
    TopDown,
    Transform,
)
from symtrans.terms import AC_SYMBOLS, FRESH_OEPS, LIST, PLUS, POW, TIMES, App, Num, Var, make, oeps, plus

_UNIT = {PLUS: Num(0), TIMES: Num(1)}


def _merge(a, b):
    out = dict(a)
    for k, v in b.items():
        if k in out and out[k] != v:
            return None
        out[k] = v
    return out


def _all(p, s):
    if isinstance(p, Var):
        return [{p.name: s}]
    if isinstance(p, Num):
        return [{}] if p == s else []
    if not isinstance(s, App) or s.head_var:
        return []
    if p.head_var:
        if len(p.args) != len(s.args) or not s.args:
            return []
        sols = [{p.head: App(s.head)}]
        for pa, sa in zip(p.args, s.args):
            sols = [m for a in sols for b in _all(pa, sa) if (m := _merge(a, b)) is not None]
        return sols
    if p.head != s.head:
        return []
    if p.head not in AC_SYMBOLS:
        if len(p.args) != len(s.args):
            return []
        sols = [{}]
        for pa, sa in zip(p.args, s.args):
            sols = [m for a in sols for b in _all(pa, sa) if (m := _merge(a, b)) is not None]
        return sols
    return _distribute(p.head, list(p.args), list(s.args), {})


def _group_sizes(head, first, n):
    # A group of two or more arguments is an AC node of this head and an
    # empty group is its unit; other pattern shapes can only take one.
    if isinstance(first, Var) or (isinstance(first, App) and first.head == head and not first.head_var):
        return range(n + 1)
    if first == _UNIT[head]:
        return (0, 1)
    return (1,)


def _distribute(head, pargs, remaining, sigma):
    """Give each subset of ``remaining`` to the first pattern argument, then recurse."""
    if not pargs:
        return [sigma] if not remaining else []
    first, rest = pargs[0], pargs[1:]
    n = len(remaining)
    if rest:
        choices = [c for r in _group_sizes(head, first, n) for c in itertools.combinations(range(n), r)]
    else:
        choices = [tuple(range(n))]
    found = []
    for chosen in choices:
        group = [remaining[i] for i in chosen]
        target = make(head, *group) if group else _UNIT[head]
        left = [a for i, a in enumerate(remaining) if i not in chosen]
        for b in _all(first, target):
            merged = _merge(sigma, b)
            if merged is not None:
                found.extend(_distribute(head, rest, left, merged))
    return found


def brute_force_matches(pattern, subject):
    """Every substitution solving ``pattern`` against ``subject``, deduplicated."""
    out = []
    for sigma in _all(pattern, subject):
        if substitute(sigma, pattern) == subject and sigma not in out:
            out.append(sigma)
    return out


# ------------------------------------------------------------------ generators

CONSTANTS = ("a", "b", "c", "d")
UNARY = ("f", "h")
BINARY = ("g",)


def random_ground(rng: random.Random, depth: int = 3, max_ac: int = 6):
    if depth <= 0 or rng.random() < 0.3:
        if rng.random() < 0.15:
            return Num(rng.randint(2, 4))
        return App(rng.choice(CONSTANTS))
    kind = rng.random()
    if kind < 0.25:
        return make(rng.choice(UNARY), random_ground(rng, depth - 1, max_ac))
    if kind < 0.4:
        return make("g", random_ground(rng, depth - 1, max_ac), random_ground(rng, depth - 1, max_ac))
    head = rng.choice((PLUS, TIMES))
    n = rng.randint(2, max_ac)
    return _limit_ac(make(head, *(random_ground(rng, depth - 1, max_ac) for _ in range(n))), max_ac)


def _limit_ac(t, max_ac):
    """Regenerate nothing; just trim AC nodes that flattened past ``max_ac``."""
    if isinstance(t, App) and t.args:
        args = [_limit_ac(a, max_ac) for a in t.args]
        if t.head in AC_SYMBOLS and not t.head_var:
            args = args[:max_ac]
        return make(t.head, *args, head_var=t.head_var)
    return t


def abstract(rng: random.Random, t, names=("X", "Y", "Z", "W"), p_var: float = 0.3, p_head: float = 0.1):
    """Replace random subterms of ``t`` by pattern variables (possibly repeated)."""
    if rng.random() < p_var:
        return Var(rng.choice(names))
    if isinstance(t, App) and t.args:
        args = [abstract(rng, a, names, p_var * 0.8, p_head) for a in t.args]
        if t.head not in AC_SYMBOLS and rng.random() < p_head:
            return make("F", *args, head_var=True)
        return make(t.head, *args)
    return t


def random_pattern(rng: random.Random, subject):
    """Mostly abstractions of ``subject``, sometimes an unrelated pattern."""
    if rng.random() < 0.8:
        return abstract(rng, subject)
    return abstract(rng, random_ground(rng, 2, 4))


_NAMES = ("a", "b", "x", "y", "Omega", "u0", "T", "Tstar", "dot", "grad", "Integral", "q1_b")


def random_canonical(rng: random.Random, depth: int = 4):
    """Canonical terms over every syntactic feature the printer handles."""
    if depth <= 0 or rng.random() < 0.25:
        r = rng.random()
        if r < 0.2:
            return Num(Fraction(rng.randint(-9, 9), rng.choice((1, 1, 2, 3, 7))))
        if r < 0.3:
            return Var(rng.choice(("X", "Y", "A1", "w")))
        if r < 0.35:
            return FRESH_OEPS
        if r < 0.4:
            return oeps(rng.randint(0, 30))
        return App(rng.choice(_NAMES))
    r = rng.random()
    sub = lambda: random_canonical(rng, depth - 1)  # noqa: E731
    if r < 0.25:
        return make(PLUS, *(sub() for _ in range(rng.randint(2, 4))))
    if r < 0.5:
        return make(TIMES, *(sub() for _ in range(rng.randint(2, 4))))
    if r < 0.6:
        return make(POW, sub(), rng.choice((Num(-1), Num(2), Num(-2), Num(Fraction(1, 2)), sub())))
    if r < 0.67:
        return make(LIST, *(sub() for _ in range(rng.randint(0, 3))))
    if r < 0.72:
        return make(rng.choice(("F", "g")), *(sub() for _ in range(rng.randint(1, 3))), head_var=True)
    return make(rng.choice(_NAMES), *(sub() for _ in range(rng.randint(1, 3))))


# ------------------------------------------------------------ numeric evaluation


def evaluate(t, env):
    """Exact value of an arithmetic term, atoms looked up in ``env``."""
    if isinstance(t, Num):
        return t.value
    if t.head == PLUS:
        return sum((evaluate(a, env) for a in t.args), Fraction(0))
    if t.head == TIMES:
        out = Fraction(1)
        for a in t.args:
            out *= evaluate(a, env)
        return out
    if t.head == POW:
        base, exp = evaluate(t.args[0], env), evaluate(t.args[1], env)
        if exp.denominator != 1:
            raise ValueError("non-integer power")
        return base ** int(exp)
    if not t.args:
        return env[t.head]
    if t.head == "f" and len(t.args) == 1:
        return 3 * evaluate(t.args[0], env) + 1
    raise ValueError(f"cannot evaluate {t!r}")


def random_arith(rng: random.Random, depth: int = 4):
    if depth <= 0 or rng.random() < 0.25:
        r = rng.random()
        if r < 0.3:
            return Num(Fraction(rng.randint(-5, 5), rng.choice((1, 2, 3))))
        return App(rng.choice(("x", "epsilon")))
    r = rng.random()
    sub = lambda: random_arith(rng, depth - 1)  # noqa: E731
    if r < 0.35:
        return make(PLUS, *(sub() for _ in range(rng.randint(2, 3))))
    if r < 0.7:
        return make(TIMES, *(sub() for _ in range(rng.randint(2, 3))))
    if r < 0.85:
        return make(POW, sub(), Num(rng.choice((-2, -1, 0, 1, 2, 3))))
    return make("f", sub())


# ---------------------------------------------------------- O(epsilon) terms

_BOUNDED = ("u", "v", "x")


def random_oeps_term(rng: random.Random, depth: int = 4):
    """Terms mixing Oeps occurrences with bounded and unbounded factors."""
    if depth <= 0 or rng.random() < 0.3:
        r = rng.random()
        if r < 0.45:
            return oeps(rng.randint(0, 50))
        if r < 0.55:
            return App("epsilon")
        if r < 0.62:
            return Num(rng.choice((2, 3, Fraction(1, 2))))
        return App(rng.choice(_BOUNDED))
    r = rng.random()
    sub = lambda: random_oeps_term(rng, depth - 1)  # noqa: E731
    if r < 0.3:
        return make(PLUS, *(sub() for _ in range(rng.randint(2, 4))))
    if r < 0.55:
        return make(TIMES, *(sub() for _ in range(rng.randint(2, 3))))
    if r < 0.7:
        return make(TIMES, Num(-1), sub())
    if r < 0.85:
        return make("Integral", App("Omega"), sub(), make(LIST, App("dx")))
    if r < 0.92:
        return make(POW, App("epsilon"), Num(-1))
    return make("g", sub())


# ------------------------------------------------------------ strategies

_RULES = [
    make_rule("AB", App("a"), App("b")),
    make_rule("BC", App("b"), App("c")),
    make_rule("DropF", App("f", (Var("X"),)), Var("X")),
    make_rule("Diag", App("g", (Var("X"), Var("X"))), Var("X")),
    make_rule("HF", App("h", (Var("X"),)), App("f", (App("X"),))),
]


def random_strategy(rng, depth=3):
    if depth <= 0 or rng.random() < 0.3:
        r = rng.random()
        if r < 0.1:
            return Identity()
        if r < 0.2:
            return Fail()
        return Transform(rng.choice(_RULES))
    r = rng.random()
    sub = lambda: random_strategy(rng, depth - 1)  # noqa: E731
    if r < 0.1:
        return IdentityAsFail(sub())
    if r < 0.2:
        return FailAsIdentity(sub())
    if r < 0.35:
        return All(sub())
    if r < 0.5:
        return TopDown(sub())
    if r < 0.6:
        return BottomUp(sub())
    if r < 0.75:
        return LeftChoice([sub() for _ in range(rng.randint(0, 3))])
    if r < 0.9:
        return Comp([sub() for _ in range(rng.randint(0, 3))])
    return Normalizer(sub())


def random_small(rng, depth=3):
    if depth <= 0 or rng.random() < 0.3:
        return App(rng.choice("abcd"))
    r = rng.random()
    if r < 0.3:
        return App(rng.choice("fh"), (random_small(rng, depth - 1),))
    if r < 0.6:
        a = random_small(rng, depth - 1)
        return App("g", (a, a if rng.random() < 0.5 else random_small(rng, depth - 1)))
    return plus(random_small(rng, depth - 1), random_small(rng, depth - 1))
