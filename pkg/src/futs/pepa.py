"""PEPA fragment: FuTS semantics, standard semantics, strong equivalence.

The FuTS side maps a term and an action ``a`` to one continuation over the
non-negative rationals (label ``delta_a``).  The standard side derives
``(action, rate, target)`` transitions and counts derivation trees.  The two
never call each other, so the correspondence checks compare independent code.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .model import FutsModel, Partition, RelationSchema
from .semiring import RATIONAL, FiniteSupportFn, rational_min
from .standard import DEFAULT_CAP, reachable, refine
from .syntax import NIL, PEPA, Choice, Const, Coop, Env, Nil, Prefix, Term, parse_program

ZERO = Fraction(0)


def label_for(action: str) -> str:
    return f"delta_{action}"


def parse_pepa(text: str) -> tuple[Env, Term | None]:
    return parse_program(text, PEPA)


def _memo(env: Env, name: str) -> dict:
    return env.memo.setdefault(name, {})


def apparent_rate(P: Term, a: str, env: Env) -> Fraction:
    """Total rate at which ``P`` offers action ``a``, by structural recursion."""
    memo = _memo(env, "pepa.rate")
    key = (P, a)
    r = memo.get(key)
    if r is not None:
        return r
    if isinstance(P, Nil):
        r = ZERO
    elif isinstance(P, Prefix):
        r = P.rate if P.action == a else ZERO
    elif isinstance(P, Choice):
        r = apparent_rate(P.left, a, env) + apparent_rate(P.right, a, env)
    elif isinstance(P, Coop):
        rl, rr = apparent_rate(P.left, a, env), apparent_rate(P.right, a, env)
        r = rational_min(rl, rr) if a in P.actions else rl + rr
    elif isinstance(P, Const):
        r = apparent_rate(env.body(P.name), a, env)
    else:
        raise TypeError(f"not a PEPA term: {P!r}")
    memo[key] = r
    return r


def _arf(x: Fraction, y: Fraction) -> Fraction:
    if x == 0 or y == 0:
        return ZERO
    return rational_min(x, y) / (x * y)


def arf_semantic(phi: FiniteSupportFn, psi: FiniteSupportFn) -> Fraction:
    """``min{sum phi, sum psi} / (sum phi * sum psi)``, or 0 if either sum is 0."""
    return _arf(phi.total(), psi.total())


def arf_syntactic(P: Term, Q: Term, a: str, env: Env) -> Fraction:
    return _arf(apparent_rate(P, a, env), apparent_rate(Q, a, env))


def futs_step(P: Term, a: str, env: Env) -> FiniteSupportFn:
    """The unique continuation of ``P`` under ``delta_a``."""
    memo = _memo(env, "pepa.step")
    key = (P, a)
    v = memo.get(key)
    if v is not None:
        return v
    if isinstance(P, Nil):
        v = FiniteSupportFn.zero(RATIONAL)
    elif isinstance(P, Prefix):
        if P.action == a:
            v = FiniteSupportFn.point(P.cont, P.rate, RATIONAL)
        else:
            v = FiniteSupportFn.zero(RATIONAL)
    elif isinstance(P, Choice):
        v = futs_step(P.left, a, env) + futs_step(P.right, a, env)
    elif isinstance(P, Const):
        v = futs_step(env.body(P.name), a, env)
    elif isinstance(P, Coop):
        vl = futs_step(P.left, a, env)
        vr = futs_step(P.right, a, env)
        acts = P.actions

        def pair(x, y):
            return Coop(x, y, acts)

        if a in acts:
            v = vl.pair_product(vr, pair).scale(arf_semantic(vl, vr))
        else:
            v = vl.pair_product(FiniteSupportFn.char(P.right, RATIONAL), pair) + FiniteSupportFn.char(
                P.left, RATIONAL
            ).pair_product(vr, pair)
    else:
        raise TypeError(f"not a PEPA term: {P!r}")
    memo[key] = v
    return v


@dataclass(frozen=True)
class StandardTransition:
    source: Term
    action: str
    rate: Fraction
    target: Term
    multiplicity: int


def _derivations(P: Term, env: Env) -> Counter:
    """``(action, rate, target) -> number of derivation trees``."""
    memo = _memo(env, "pepa.derivations")
    d = memo.get(P)
    if d is not None:
        return d
    d = Counter()
    if isinstance(P, Prefix):
        d[(P.action, P.rate, P.cont)] += 1
    elif isinstance(P, Choice):
        d.update(_derivations(P.left, env))
        d.update(_derivations(P.right, env))
    elif isinstance(P, Const):
        d.update(_derivations(env.body(P.name), env))
    elif isinstance(P, Coop):
        left, right = _derivations(P.left, env), _derivations(P.right, env)
        acts = P.actions
        for (a, lam, P1), m in left.items():
            if a not in acts:
                d[(a, lam, Coop(P1, P.right, acts))] += m
        for (a, lam, Q1), m in right.items():
            if a not in acts:
                d[(a, lam, Coop(P.left, Q1, acts))] += m
        for (a, l1, P1), m1 in left.items():
            if a not in acts:
                continue
            for (b, l2, Q1), m2 in right.items():
                if b == a:
                    lam = arf_syntactic(P.left, P.right, a, env) * l1 * l2
                    d[(a, lam, Coop(P1, Q1, acts))] += m1 * m2
    elif not isinstance(P, Nil):
        raise TypeError(f"not a PEPA term: {P!r}")
    memo[P] = d
    return d


def standard_transitions(P: Term, env: Env) -> list[StandardTransition]:
    """All derivable transitions of ``P`` with their multiplicities."""
    return [StandardTransition(P, a, lam, t, m) for (a, lam, t), m in _derivations(P, env).items()]


def q_rate(P: Term, C, a: str, env: Env) -> Fraction:
    """Total conditional transition rate from ``P`` into the set ``C`` via ``a``."""
    total = ZERO
    for (b, lam, t), m in _derivations(P, env).items():
        if b == a and t in C:
            total += lam * m
    return total


def _roots(roots) -> list:
    return [roots] if isinstance(roots, Term) else list(roots)


def explore_pepa(roots, env: Env, cap: int = DEFAULT_CAP) -> FutsModel:
    """Reachable part of the PEPA FuTS from ``roots`` (a term or several)."""
    roots = _roots(roots)
    env = env.with_terms(*roots)
    alphabet = env.alphabet

    def successors(s):
        for a in alphabet:
            yield from futs_step(s, a, env)

    states = reachable(roots, successors, cap)
    if not alphabet:
        return FutsModel(states, (), {})
    schema = RelationSchema(1, tuple(label_for(a) for a in alphabet), RATIONAL)
    table = {(1, s, label_for(a)): futs_step(s, a, env) for s in states for a in alphabet}
    return FutsModel(states, (schema,), table)


def standard_states(roots, env: Env, cap: int = DEFAULT_CAP) -> list:
    def successors(s):
        return (t for (_a, _lam, t) in _derivations(s, env))

    return reachable(_roots(roots), successors, cap)


def strong_equivalence_partition(roots, env: Env, cap: int = DEFAULT_CAP) -> Partition:
    """Coarsest strong equivalence over the standard-semantics reachable states."""
    roots = _roots(roots)
    env = env.with_terms(*roots)
    states = standard_states(roots, env, cap)

    def signature(s, block_of):
        q = Counter()
        for (a, lam, t), m in _derivations(s, env).items():
            q[(a, block_of[t])] += lam * m
        return frozenset(q.items())

    return refine(states, signature)


def strongly_equivalent(P1: Term, P2: Term, env: Env, cap: int = DEFAULT_CAP) -> bool:
    return strong_equivalence_partition([P1, P2], env, cap).same(P1, P2)


__all__ = [
    "NIL",
    "StandardTransition",
    "apparent_rate",
    "arf_semantic",
    "arf_syntactic",
    "explore_pepa",
    "futs_step",
    "label_for",
    "parse_pepa",
    "q_rate",
    "standard_states",
    "standard_transitions",
    "strong_equivalence_partition",
    "strongly_equivalent",
]
