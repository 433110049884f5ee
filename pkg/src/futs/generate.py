"""Seeded generator of closed, guarded PEPA / IML programs.

Each program optionally defines one recursive constant ``X`` whose body is
sequential (prefix and choice only) so state spaces stay finite; the root may
use cooperation.  Operators are drawn choice : prefix : cooperation = 3 : 3 : 1,
rates from a small pool of rationals, cooperation sets from ``{a, b, c}``.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .syntax import IML, NIL, PEPA, Act, Choice, Const, Coop, Delay, Prefix, Term, show

ACTIONS = ("a", "b", "c")
RATES = (Fraction(1), Fraction(2), Fraction(3), Fraction(1, 2), Fraction(3, 2))
OP_WEIGHTS = (("choice", 3), ("prefix", 3), ("coop", 1))
CONST = "X"


class _Gen:
    def __init__(self, rng: random.Random, language: str):
        self.rng = rng
        self.language = language

    def prefix(self, cont: Term) -> Term:
        rng = self.rng
        if self.language == PEPA:
            return Prefix(rng.choice(ACTIONS), rng.choice(RATES), cont)
        if rng.random() < 0.5:
            return Act(rng.choice(ACTIONS), cont)
        return Delay(rng.choice(RATES), cont)

    def op(self, allowed) -> str:
        names = [n for n, _ in OP_WEIGHTS if n in allowed]
        weights = [w for n, w in OP_WEIGHTS if n in allowed]
        return self.rng.choices(names, weights)[0]

    def leaf(self, have_const: bool) -> Term:
        end = Const(CONST) if have_const and self.rng.random() < 0.5 else NIL
        return self.prefix(end) if self.rng.random() < 0.5 else end

    def body(self, depth: int, guarded: bool) -> Term:
        if depth <= 1:
            if guarded:
                return self.leaf(True)
            return self.prefix(NIL) if self.rng.random() < 0.5 else NIL
        if self.op(("choice", "prefix")) == "prefix":
            return self.prefix(self.body(depth - 1, True))
        return Choice(self.body(depth - 1, guarded), self.body(depth - 1, guarded))

    def root(self, depth: int, have_const: bool) -> Term:
        if depth <= 1:
            return self.leaf(have_const)
        op = self.op(("choice", "prefix", "coop"))
        if op == "prefix":
            return self.prefix(self.root(depth - 1, have_const))
        if op == "choice":
            return Choice(self.root(depth - 1, have_const), self.root(depth - 1, have_const))
        acts = [a for a in ACTIONS if self.rng.random() < 0.5]
        return Coop(self.root(depth - 1, have_const), self.root(depth - 1, have_const), acts)


def generate_program(rng: random.Random, language: str, depth: int) -> str:
    if language not in (PEPA, IML):
        raise ValueError(f"cannot generate programs for {language!r}")
    if depth < 1:
        raise ValueError("depth must be at least 1")
    g = _Gen(rng, language)
    lines = []
    have_const = rng.random() < 0.5
    if have_const:
        # top-level prefix keeps the body guarded even at depth 1
        lines.append(f"{CONST} := {show(g.prefix(g.body(max(depth - 1, 1), True)))}")
    lines.append(show(g.root(depth, have_const)))
    return "\n".join(lines)


def generate_corpus(language: str, seed: int, count: int, depth: int) -> list[str]:
    """``count`` programs, deterministic for a fixed seed."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    rng = random.Random(seed)
    return [generate_program(rng, language, depth) for _ in range(count)]


def format_corpus(programs: list[str]) -> str:
    return "\n---\n".join(programs) + "\n"


def random_futs_model(rng: random.Random, n_states: int, n_relations: int | None = None, out_degree: int = 2):
    """Random raw model with string states ``s0..``; relation semirings are drawn independently.

    Values come from a tiny pool and successors are sparse, so nontrivial
    bisimulations are common.
    """
    from .model import FutsModel, RelationSchema
    from .semiring import BOOLEAN, RATIONAL, FiniteSupportFn

    states = [f"s{k}" for k in range(n_states)]
    if n_relations is None:
        n_relations = rng.randint(1, 2)
    schemas = []
    for i in range(1, n_relations + 1):
        sr = rng.choice((BOOLEAN, RATIONAL))
        schemas.append(RelationSchema(i, tuple(rng.sample(("a", "b", "c"), rng.randint(1, 2))), sr))
    pool = (Fraction(1), Fraction(1), Fraction(2), Fraction(1, 2))
    table = {}
    for sc in schemas:
        for s in states:
            for label in sc.labels:
                k = rng.randint(0, out_degree)
                targets = rng.sample(states, min(k, n_states))
                if sc.semiring is BOOLEAN:
                    entries = {t: True for t in targets}
                else:
                    entries = {t: rng.choice(pool) for t in targets}
                table[(sc.index, s, label)] = FiniteSupportFn(sc.semiring, entries)
    return FutsModel(states, schemas, table)
