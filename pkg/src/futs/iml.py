"""IML fragment of interactive Markov chains.

Two FuTS relations: relation 1 labels actions with boolean continuations,
relation 2 has the single label ``delta`` with rational continuations.  The
standard semantics keeps action transitions as a set and Markovian delays as a
multiset with derivation counts.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction

from .model import FutsModel, Partition, RelationSchema
from .semiring import BOOLEAN, RATIONAL, FiniteSupportFn
from .standard import DEFAULT_CAP, reachable, refine
from .syntax import IML, Act, Choice, Const, Coop, Delay, Env, Nil, Term, parse_program

DELTA = "delta"
ACTIONS_REL = 1
DELAY_REL = 2


def parse_iml(text: str) -> tuple[Env, Term | None]:
    return parse_program(text, IML)


def _memo(env: Env, name: str) -> dict:
    return env.memo.setdefault(name, {})


def _interleave(vl, vr, P: Coop, semiring):
    acts = P.actions

    def pair(x, y):
        return Coop(x, y, acts)

    return vl.pair_product(FiniteSupportFn.char(P.right, semiring), pair) + FiniteSupportFn.char(
        P.left, semiring
    ).pair_product(vr, pair)


def futs_action_step(P: Term, a: str, env: Env) -> FiniteSupportFn:
    """Boolean continuation of ``P`` under action ``a`` (relation 1)."""
    memo = _memo(env, "iml.act")
    key = (P, a)
    v = memo.get(key)
    if v is not None:
        return v
    if isinstance(P, Nil | Delay):
        v = FiniteSupportFn.zero(BOOLEAN)
    elif isinstance(P, Act):
        v = FiniteSupportFn.char(P.cont, BOOLEAN) if P.action == a else FiniteSupportFn.zero(BOOLEAN)
    elif isinstance(P, Choice):
        v = futs_action_step(P.left, a, env) + futs_action_step(P.right, a, env)
    elif isinstance(P, Const):
        v = futs_action_step(env.body(P.name), a, env)
    elif isinstance(P, Coop):
        vl = futs_action_step(P.left, a, env)
        vr = futs_action_step(P.right, a, env)
        if a in P.actions:
            acts = P.actions
            v = vl.pair_product(vr, lambda x, y: Coop(x, y, acts))
        else:
            v = _interleave(vl, vr, P, BOOLEAN)
    else:
        raise TypeError(f"not an IML term: {P!r}")
    memo[key] = v
    return v


def futs_delay_step(P: Term, env: Env) -> FiniteSupportFn:
    """Rational continuation of ``P`` under ``delta`` (relation 2); delays never synchronize."""
    memo = _memo(env, "iml.delay")
    v = memo.get(P)
    if v is not None:
        return v
    if isinstance(P, Nil | Act):
        v = FiniteSupportFn.zero(RATIONAL)
    elif isinstance(P, Delay):
        v = FiniteSupportFn.point(P.cont, P.rate, RATIONAL)
    elif isinstance(P, Choice):
        v = futs_delay_step(P.left, env) + futs_delay_step(P.right, env)
    elif isinstance(P, Const):
        v = futs_delay_step(env.body(P.name), env)
    elif isinstance(P, Coop):
        v = _interleave(futs_delay_step(P.left, env), futs_delay_step(P.right, env), P, RATIONAL)
    else:
        raise TypeError(f"not an IML term: {P!r}")
    memo[P] = v
    return v


def standard_action_transitions(P: Term, env: Env) -> frozenset:
    """The set of ``(action, target)`` pairs derivable for ``P``."""
    memo = _memo(env, "iml.std_act")
    r = memo.get(P)
    if r is not None:
        return r
    if isinstance(P, Nil | Delay):
        r = frozenset()
    elif isinstance(P, Act):
        r = frozenset({(P.action, P.cont)})
    elif isinstance(P, Choice):
        r = standard_action_transitions(P.left, env) | standard_action_transitions(P.right, env)
    elif isinstance(P, Const):
        r = standard_action_transitions(env.body(P.name), env)
    elif isinstance(P, Coop):
        acts = P.actions
        left = standard_action_transitions(P.left, env)
        right = standard_action_transitions(P.right, env)
        out = set()
        for a, P1 in left:
            if a not in acts:
                out.add((a, Coop(P1, P.right, acts)))
        for a, Q1 in right:
            if a not in acts:
                out.add((a, Coop(P.left, Q1, acts)))
        for a, P1 in left:
            if a in acts:
                for b, Q1 in right:
                    if b == a:
                        out.add((a, Coop(P1, Q1, acts)))
        r = frozenset(out)
    else:
        raise TypeError(f"not an IML term: {P!r}")
    memo[P] = r
    return r


def _delay_derivations(P: Term, env: Env) -> Counter:
    memo = _memo(env, "iml.std_delay")
    d = memo.get(P)
    if d is not None:
        return d
    d = Counter()
    if isinstance(P, Delay):
        d[(P.rate, P.cont)] += 1
    elif isinstance(P, Choice):
        d.update(_delay_derivations(P.left, env))
        d.update(_delay_derivations(P.right, env))
    elif isinstance(P, Const):
        d.update(_delay_derivations(env.body(P.name), env))
    elif isinstance(P, Coop):
        acts = P.actions
        for (lam, P1), m in _delay_derivations(P.left, env).items():
            d[(lam, Coop(P1, P.right, acts))] += m
        for (lam, Q1), m in _delay_derivations(P.right, env).items():
            d[(lam, Coop(P.left, Q1, acts))] += m
    elif not isinstance(P, Nil | Act):
        raise TypeError(f"not an IML term: {P!r}")
    memo[P] = d
    return d


def standard_delay_transitions(P: Term, env: Env) -> list[tuple[Fraction, Term, int]]:
    """Markovian transitions ``(rate, target, multiplicity)``."""
    return [(lam, t, m) for (lam, t), m in _delay_derivations(P, env).items()]


def t_fn(P: Term, a: str, C, env: Env) -> bool:
    """Whether ``P`` can do ``a`` into some member of ``C``."""
    return any(b == a and t in C for b, t in standard_action_transitions(P, env))


def r_fn(P: Term, C, env: Env) -> Fraction:
    """Cumulative Markovian rate from ``P`` into ``C``."""
    return sum((lam * m for (lam, t), m in _delay_derivations(P, env).items() if t in C), Fraction(0))


def _roots(roots) -> list:
    return [roots] if isinstance(roots, Term) else list(roots)


def explore_iml(roots, env: Env, cap: int = DEFAULT_CAP) -> FutsModel:
    """Reachable part of the IML FuTS; relation 1 is omitted when the alphabet is empty."""
    roots = _roots(roots)
    env = env.with_terms(*roots)
    alphabet = env.alphabet

    def successors(s):
        for a in alphabet:
            yield from futs_action_step(s, a, env)
        yield from futs_delay_step(s, env)

    states = reachable(roots, successors, cap)
    schemas = []
    table = {}
    if alphabet:
        schemas.append(RelationSchema(ACTIONS_REL, alphabet, BOOLEAN))
        for s in states:
            for a in alphabet:
                table[(ACTIONS_REL, s, a)] = futs_action_step(s, a, env)
    schemas.append(RelationSchema(DELAY_REL, (DELTA,), RATIONAL))
    for s in states:
        table[(DELAY_REL, s, DELTA)] = futs_delay_step(s, env)
    return FutsModel(states, schemas, table)


def standard_states(roots, env: Env, cap: int = DEFAULT_CAP) -> list:
    def successors(s):
        for _a, t in standard_action_transitions(s, env):
            yield t
        for _lam, t in _delay_derivations(s, env):
            yield t

    return reachable(_roots(roots), successors, cap)


def strong_bisimulation_partition(roots, env: Env, cap: int = DEFAULT_CAP) -> Partition:
    """Coarsest strong bisimulation: equal ``T`` per action and class, equal ``R`` per class."""
    roots = _roots(roots)
    env = env.with_terms(*roots)
    states = standard_states(roots, env, cap)

    def signature(s, block_of):
        can = frozenset((a, block_of[t]) for a, t in standard_action_transitions(s, env))
        rates = Counter()
        for (lam, t), m in _delay_derivations(s, env).items():
            rates[block_of[t]] += lam * m
        return can, frozenset(rates.items())

    return refine(states, signature)


def strongly_bisimilar(P1: Term, P2: Term, env: Env, cap: int = DEFAULT_CAP) -> bool:
    return strong_bisimulation_partition([P1, P2], env, cap).same(P1, P2)
