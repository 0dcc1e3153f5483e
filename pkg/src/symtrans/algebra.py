"""Sum-of-products normalization standing in for a CAS's automatic simplifier.

Every term is read as a polynomial over atoms: a monomial is a rational
coefficient times a product of ``base ** exponent`` factors with rational
exponents, and equal bases merge their exponents (so ``epsilon^-1 *
epsilon`` cancels).  Arguments of every other symbol are normalized
recursively.  ``Oeps`` leaves are plain atoms here; collapsing them is the
job of the convergence rules.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Tuple

from .terms import PLUS, POW, TIMES, App, Num, Term, make, sort_key

Monomial = Tuple[Tuple[Term, Fraction], ...]
_MAX_POWER = 16


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    exps: Dict[Term, Fraction] = dict(a)
    for base, e in b:
        exps[base] = exps.get(base, Fraction(0)) + e
    return tuple(sorted(((k, v) for k, v in exps.items() if v != 0), key=lambda kv: sort_key(kv[0])))


def _poly(t: Term) -> List[Tuple[Fraction, Monomial]]:
    """Expanded form of ``t`` as an (uncollected) list of monomials."""
    if isinstance(t, Num):
        return [(t.value, ())] if t.value != 0 else []
    if isinstance(t, App) and not t.head_var:
        if t.head == PLUS:
            out = []
            for a in t.args:
                out.extend(_poly(a))
            return out
        if t.head == TIMES:
            acc = [(Fraction(1), ())]
            for a in t.args:
                acc = [(c1 * c2, _mono_mul(m1, m2)) for c1, m1 in acc for c2, m2 in _poly(a)]
            return acc
        if t.head == POW and len(t.args) == 2:
            base, exp = _normal(t.args[0]), _normal(t.args[1])
            if isinstance(exp, Num):
                e = exp.value
                terms = _collect(_poly(base))
                if e == 0:
                    return [(Fraction(1), ())]
                if not terms:
                    if e > 0:
                        return []
                elif e.denominator != 1:
                    pass
                elif len(terms) == 1:
                    c, m = terms[0]
                    return [(c ** int(e), tuple((b, x * e) for b, x in m))]
                elif 0 < e <= _MAX_POWER:
                    acc = [(Fraction(1), ())]
                    for _ in range(int(e)):
                        acc = [(c1 * c2, _mono_mul(m1, m2)) for c1, m1 in acc for c2, m2 in terms]
                    return acc
            return [(Fraction(1), ((make(POW, base, exp), Fraction(1)),))]
    return [(Fraction(1), ((_normal_args(t), Fraction(1)),))]


def _normal_args(t: Term) -> Term:
    if isinstance(t, App) and t.args:
        return make(t.head, *(_normal(a) for a in t.args), head_var=t.head_var)
    return t


def _collect(monos) -> List[Tuple[Fraction, Monomial]]:
    acc: Dict[Monomial, Fraction] = {}
    for c, m in monos:
        acc[m] = acc.get(m, Fraction(0)) + c
    return [(c, m) for m, c in acc.items() if c != 0]


def _to_term(monos) -> Term:
    summands = []
    for c, m in monos:
        factors = [b if e == 1 else make(POW, b, Num(e)) for b, e in m]
        summands.append(make(TIMES, Num(c), *factors))
    return make(PLUS, *summands)


def _normal(t: Term) -> Term:
    return _to_term(_collect(_poly(t)))


def expand(t: Term) -> Term:
    """Distribute products over sums and merge powers, without collecting."""
    return _to_term(_poly(t))


def simplify(t: Term) -> Term:
    """Expand, then collect like terms; idempotent."""
    return _normal(t)
