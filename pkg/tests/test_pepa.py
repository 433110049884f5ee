from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from futs.bisim import coarsest_bisimulation, is_bisimulation
from futs.errors import StateCapExceeded
from futs.generate import generate_corpus
from futs.pepa import (
    apparent_rate,
    arf_semantic,
    arf_syntactic,
    explore_pepa,
    futs_step,
    label_for,
    parse_pepa,
    q_rate,
    standard_transitions,
    strong_equivalence_partition,
    strongly_equivalent,
)
from futs.semiring import RATIONAL, FiniteSupportFn
from futs.syntax import NIL, Const, Coop, Env, PEPA, parse_term


def program(text):
    env, root = parse_pepa(text)
    return env, root


def term(text, env=None):
    env = env or Env(PEPA)
    t = parse_term(text, PEPA)
    return env.with_terms(t), t


# --- apparent rate / arf ---


def test_apparent_rate_clauses():
    env, t = term("(a,5/2).nil")
    assert apparent_rate(t, "a", env) == F(5, 2)
    assert apparent_rate(t, "b", env) == 0
    assert apparent_rate(NIL, "a", env) == 0
    env, t = term("(a,2).nil <a> (a,3).nil")
    assert apparent_rate(t, "a", env) == 2
    env, t = term("(a,2).nil <b> (a,3).nil")
    assert apparent_rate(t, "a", env) == 5
    env, t = term("(a,1).nil + (a,1/2).nil + (b,7).nil")
    assert apparent_rate(t, "a", env) == F(3, 2)


def test_apparent_rate_through_constant():
    env, root = program("X := (a,2).X + (a,1).nil\nX")
    assert apparent_rate(root, "a", env) == 3


def test_arf_examples():
    phi = FiniteSupportFn(RATIONAL, {"p": F(2)})
    psi = FiniteSupportFn(RATIONAL, {"q": F(1), "r": F(2)})
    assert arf_semantic(phi, psi) == F(1, 3)
    assert arf_semantic(FiniteSupportFn.zero(RATIONAL), psi) == 0
    lam = F(3, 7)
    p = FiniteSupportFn(RATIONAL, {"p": lam})
    assert arf_semantic(p, p) == 1 / lam


# --- futs_step ---


@pytest.mark.parametrize("lam", [F(1), F(1, 2), F(3, 7)])
def test_duplicate_branch(lam):
    env, root = program(f"P := nil\n(a,{lam}).P + (a,{lam}).P")
    assert futs_step(root, "a", env) == FiniteSupportFn(RATIONAL, {Const("P"): 2 * lam})


def test_step_nil_and_other_action():
    env, t = term("(b,1).nil")
    assert futs_step(NIL, "a", env) == FiniteSupportFn.zero(RATIONAL)
    assert futs_step(t, "a", env) == FiniteSupportFn.zero(RATIONAL)


def test_step_synchronised():
    env, t = term("(a,2).nil <a> (a,3).nil")
    got = futs_step(t, "a", env)
    assert got == FiniteSupportFn(RATIONAL, {Coop(NIL, NIL, ["a"]): F(2)})
    assert q_rate(t, {Coop(NIL, NIL, ["a"])}, "a", env) == 2


def test_step_interleaved():
    env, t = term("(a,2).nil <b> (a,3).nil")
    got = futs_step(t, "a", env)
    left = Coop(NIL, parse_term("(a,3).nil", PEPA), ["b"])
    right = Coop(parse_term("(a,2).nil", PEPA), NIL, ["b"])
    assert dict(got) == {left: F(2), right: F(3)}


def test_sync_blocked_when_one_side_cannot():
    env, t = term("(a,2).nil <a> (b,3).nil")
    assert futs_step(t, "a", env) == FiniteSupportFn.zero(RATIONAL)


def test_sync_with_choice_on_both_sides():
    # left offers a at 1 and 2 (r=3), right at 4 (r=4); arf = 3 / 12
    env, t = term("((a,1).A + (a,2).B) <a> (a,4).C", Env(PEPA, {"A": NIL, "B": NIL, "C": NIL}))
    got = futs_step(t, "a", env)
    assert got.total() == 3
    assert got[Coop(Const("A"), Const("C"), ["a"])] == 1
    assert got[Coop(Const("B"), Const("C"), ["a"])] == 2


# --- standard semantics ---


def test_standard_prefix():
    env, t = term("(a,5).nil")
    (tr,) = standard_transitions(t, env)
    assert (tr.action, tr.rate, tr.target, tr.multiplicity) == ("a", 5, NIL, 1)


def test_standard_multiplicity():
    env, root = program("P := nil\n(a,1).P + (a,1).P")
    (tr,) = standard_transitions(root, env)
    assert (tr.rate, tr.target, tr.multiplicity) == (1, Const("P"), 2)
    assert standard_transitions(NIL, env) == []


def test_q_rate_examples():
    lam = F(3, 7)
    env, root = program(f"P := nil\n(a,{lam}).P")
    assert q_rate(root, {Const("P")}, "a", env) == lam
    assert q_rate(NIL, {Const("P")}, "a", env) == 0
    env, root = program("P := nil\n(a,1).P + (a,1).P")
    assert q_rate(root, {Const("P")}, "a", env) == 2


def test_standard_sync_rate():
    env, t = term("(a,2).nil <a> ((a,3).nil + (a,1).nil)")
    trs = standard_transitions(t, env)
    # arf = min(2, 4) / (2 * 4) = 1/4
    assert sorted(tr.rate for tr in trs) == [F(1, 2), F(3, 2)]


# --- exploration ---


def test_explore_two_state_chain():
    env, t = term("(a,1).nil")
    m = explore_pepa(t, env)
    assert m.states == (t, NIL)
    assert m.theta(1, t, label_for("a")) == FiniteSupportFn(RATIONAL, {NIL: F(1)})
    assert not m.theta(1, NIL, label_for("a"))
    assert m.schemas[0].semiring is RATIONAL


def test_explore_nil():
    env, t = term("nil")
    m = explore_pepa(t, env)
    assert m.states == (NIL,)
    m = explore_pepa(t, Env(PEPA, alphabet=["a"]))
    assert list(m.rows())[0][3] == FiniteSupportFn.zero(RATIONAL)


def test_explore_recursive_constant():
    env, root = program("X := (a,1).X\nX")
    m = explore_pepa(root, env)
    assert m.states == (Const("X"),)
    assert m.theta(1, Const("X"), "delta_a") == FiniteSupportFn(RATIONAL, {Const("X"): F(1)})


def test_cap():
    env, root = program("X := (a,1).X + (b,1).nil\nX <> X <> X <> X")
    with pytest.raises(StateCapExceeded) as e:
        explore_pepa(root, env, cap=5)
    assert e.value.cap == 5
    with pytest.raises(StateCapExceeded):
        strong_equivalence_partition(root, env, cap=5)


# --- equivalence ---


def test_duplicate_branch_not_equivalent():
    for lam in (F(1), F(1, 2), F(3, 7)):
        env, _ = program("P := nil")
        env, p1 = term(f"(a,{lam}).P", env)
        env, p2 = term(f"(a,{lam}).P + (a,{lam}).P", env)
        assert not strongly_equivalent(p1, p2, env)
        assert not coarsest_bisimulation(explore_pepa([p1, p2], env)).same(p1, p2)


def test_deadlock_single_block():
    env, t = term("nil")
    assert len(strong_equivalence_partition(t, env)) == 1


def test_equivalent_by_lumping():
    env, p1 = term("(a,1).(b,1).nil + (a,1).(b,1).nil")
    env, p2 = term("(a,2).(b,1).nil", env)
    assert strongly_equivalent(p1, p2, env)
    assert coarsest_bisimulation(explore_pepa([p1, p2], env)).same(p1, p2)


# --- properties on generated corpora ---

seeds = st.integers(0, 2**32 - 1)


def _corpus(seed, n=15, depth=4):
    return [parse_pepa(src) for src in generate_corpus(PEPA, seed, n, depth)]


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_totals_are_apparent_rates_and_arf_agrees(seed):
    for env, root in _corpus(seed):
        m = explore_pepa(root, env)
        for s in m.states:
            for a in env.alphabet:
                v = futs_step(s, a, env)
                assert v.total() == apparent_rate(s, a, env)
        for s in m.states[:5]:
            for t in m.states[:5]:
                for a in env.alphabet:
                    assert arf_semantic(futs_step(s, a, env), futs_step(t, a, env)) == arf_syntactic(s, t, a, env)


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_continuations_match_standard_rates(seed):
    for env, root in _corpus(seed):
        m = explore_pepa(root, env)
        for s in m.states:
            for a in env.alphabet:
                v = futs_step(s, a, env)
                targets = set(v) | {tr.target for tr in standard_transitions(s, env)}
                for t in targets:
                    assert v[t] == q_rate(s, {t}, a, env)


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_totality_and_equivalence_correspondence(seed):
    for env, root in _corpus(seed):
        m = explore_pepa(root, env)  # FutsModel construction audits totality
        p = coarsest_bisimulation(m)
        assert is_bisimulation(m, p)
        assert p == strong_equivalence_partition(root, env)
