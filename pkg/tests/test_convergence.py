import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import random_oeps_term
from symtrans.convergence import (
    CONVERGENCE_RULES,
    NEG_OEPS,
    Session,
    convergence_strategy,
    eval_fresh,
    fresh_index,
    is_bounded,
    lift_oeps_rule,
    oeps_indexes,
    transform,
)
from symtrans.dsl import parse_rule_file, render_rule
from symtrans.dsl import parse_term as P
from symtrans.rules import RewriteFailure, apply_at_top
from symtrans.terms import FRESH_OEPS, equiv_mod_oeps, is_oeps, oeps, symbol_count

B1 = parse_rule_file("ApproximationB1 := [B(w_), Tstar(w) + Oeps];").rules["ApproximationB1"]


def test_fresh_index():
    s = Session()
    assert [fresh_index(s) for _ in range(3)] == [0, 1, 2]
    assert fresh_index(Session()) == 0


def test_eval_fresh():
    s = Session()
    ev = eval_fresh(s)
    assert ev(FRESH_OEPS) == oeps(0)
    assert ev(FRESH_OEPS) == oeps(1)
    for t in (oeps(3), P("a + Oeps")):
        with pytest.raises(RewriteFailure):
            ev(t)


def test_lifted_rule_gets_new_index_each_time():
    s = Session()
    lifted = lift_oeps_rule(s, NEG_OEPS)
    k1, k2 = lifted(P("-Oeps(1)")), lifted(P("-Oeps(1)"))
    assert is_oeps(k1) and is_oeps(k2) and k1 != k2


def test_lifted_approximation():
    out = transform(B1, Session())(P("B(w)"))
    assert out == P("Tstar(w) + Oeps(0)")
    with pytest.raises(RewriteFailure):
        transform(B1, Session())(P("T(w)"))
    with pytest.raises(ValueError):
        lift_oeps_rule(Session(), parse_rule_file("r := [a, b];").rules["r"])


def test_rule_keeps_marker_until_applied():
    text = render_rule(B1)
    assert "Oeps" in text and "Oeps(" not in text
    again = parse_rule_file(f"ApproximationB1 := {text};").rules["ApproximationB1"]
    assert again.rhs == B1.rhs
    assert FRESH_OEPS in again.rhs.args


def test_is_bounded():
    s = Session(bounded=("u", "v", "x", "y"))
    assert is_bounded(s, P("dot(grad(x, u), v)"))
    assert not is_bounded(s, P("1/epsilon"))
    assert not is_bounded(s, P("epsilon"))
    assert is_bounded(s, P("2*u + Oeps(epsilon)"))
    assert not is_bounded(s, P("X_"))
    with pytest.raises(ValueError):
        Session(bounded=("epsilon",))


def test_convergence_examples():
    run = lambda text: convergence_strategy(Session(bounded=("u",)))(P(text))  # noqa: E731
    assert is_oeps(run("Oeps(1) - Oeps(1)"))
    assert is_oeps(run("Integral(Omega, Oeps(2), [dx])"))
    assert run("a + b") == P("a + b")
    assert is_oeps(run("-Oeps(5)"))
    assert is_oeps(run("u*Oeps(1) + Integral(Omega, Oeps(2), [dx])"))


def test_unbounded_factor_is_kept():
    t = P("1/epsilon*Oeps(1)")
    s = Session(bounded=("u",))
    for rule in CONVERGENCE_RULES:
        with pytest.raises(RewriteFailure):
            apply_at_top(rule, t, s)
    assert convergence_strategy(s)(t) == t


def test_two_stage_reduction_shrinks():
    s = Session(bounded=("u",))
    strategy = convergence_strategy(s)
    t = P("u*Oeps(1) + Integral(Omega, Oeps(2), [dx])")
    sizes = [symbol_count(t)]
    while True:
        u = strategy.step(t)
        if u == t:
            break
        sizes.append(symbol_count(u))
        t = u
    assert sizes == sorted(sizes, reverse=True) and len(set(sizes)) == len(sizes)
    assert is_oeps(t)


def test_reserve_avoids_collisions():
    s = Session()
    s.reserve(P("Oeps(4) + Oeps(1)"))
    assert fresh_index(s) == 5


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=2**32))
def test_idempotent_modulo_indexes(seed):
    t = random_oeps_term(random.Random(seed))
    s = Session(bounded=("u", "v", "x"))
    s.reserve(t)
    start = s.counter
    once = convergence_strategy(s)(t)
    twice = convergence_strategy(s)(once)
    assert equiv_mod_oeps(once, twice)
    emitted = [i for i in oeps_indexes(once) if i >= start]
    assert len(set(emitted)) == len(emitted)
