"""Bisimulation for FuTS: checking, coarsest partition, oracle and quotient."""

from __future__ import annotations

from dataclasses import dataclass

from . import kernels
from .errors import ModelError
from .model import FutsModel, Partition
from .semiring import FiniteSupportFn

ORACLE_MAX_STATES = 8


def _class_sums(fn: FiniteSupportFn, partition: Partition) -> dict:
    sr = fn.semiring
    sums = {}
    for t, v in fn.items():
        k = partition.block_of(t)
        sums[k] = sr.add(sums.get(k, sr.zero), v)
    return {k: v for k, v in sums.items() if not sr.is_zero(v)}


def is_bisimulation(model: FutsModel, partition: Partition) -> bool:
    """Whether related states have equal class sums for every relation, label and class."""
    partition.check_against(model)
    for block in partition.blocks:
        first = block[0]
        for sc in model.schemas:
            for label in sc.labels:
                ref = _class_sums(model.theta(sc.index, first, label), partition)
                for s in block[1:]:
                    if _class_sums(model.theta(sc.index, s, label), partition) != ref:
                        return False
    return True


def refinement_trace(model: FutsModel, backend: str = "auto") -> list[list[int]]:
    """Block numbering after each round, starting from the single block."""
    enc = kernels.encode(model)
    blocks = [0] * len(model.states)
    nblocks = 1 if model.states else 0
    trace = [blocks]
    while True:
        new, count = kernels.refine_round(enc, blocks, nblocks, backend)
        if count == nblocks:
            return trace
        blocks, nblocks = list(new), count
        trace.append(blocks)


def coarsest_bisimulation(model: FutsModel, backend: str = "auto") -> Partition:
    """The largest bisimulation, by signature refinement from the one-block partition."""
    trace = refinement_trace(model, backend)
    return Partition.from_labels(model.states, trace[-1])


def _set_partitions(n: int):
    # restricted growth strings
    labels = [0] * n
    if n == 0:
        yield []
        return

    def rec(i, m):
        if i == n:
            yield list(labels)
            return
        for b in range(m + 1):
            labels[i] = b
            yield from rec(i + 1, max(m, b + 1))

    labels[0] = 0
    yield from rec(1, 1)


def brute_force_coarsest(model: FutsModel) -> Partition:
    """Relate two states iff some partition of the state set is a bisimulation joining them."""
    n = len(model.states)
    if n > ORACLE_MAX_STATES:
        raise ModelError("too-large", f"{n} states exceed the oracle bound of {ORACLE_MAX_STATES}")
    states = model.states
    related = set()
    for labels in _set_partitions(n):
        p = Partition.from_labels(states, labels)
        if is_bisimulation(model, p):
            for i in range(n):
                for j in range(n):
                    if labels[i] == labels[j]:
                        related.add((i, j))
    # the union of all bisimulations must itself be an equivalence and a bisimulation
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in related:
        parent[find(i)] = find(j)
    result = Partition.from_labels(states, [find(i) for i in range(n)])
    for i in range(n):
        for j in range(n):
            if result.same(states[i], states[j]) != ((i, j) in related):
                raise AssertionError("union of bisimulations is not transitive")
    if not is_bisimulation(model, result):
        raise AssertionError("union of bisimulations is not a bisimulation")
    return result


def quotient(model: FutsModel, partition: Partition) -> FutsModel:
    """Merge each block into its first member; rows are class-summed.

    ``partition`` must be a bisimulation, otherwise the rows of merged states
    would disagree and the quotient is not well defined.
    """
    partition.check_against(model)
    if not is_bisimulation(model, partition):
        raise ModelError("not-a-bisimulation", "quotient requires a bisimulation partition")
    reps = [b[0] for b in partition.blocks]
    table = {}
    for sc in model.schemas:
        for rep in reps:
            for label in sc.labels:
                sums = _class_sums(model.theta(sc.index, rep, label), partition)
                table[(sc.index, rep, label)] = FiniteSupportFn._trusted(
                    sc.semiring, {reps[k]: v for k, v in sorted(sums.items())}
                )
    return FutsModel(reps, model.schemas, table)


def check_homomorphism(model: FutsModel, partition: Partition, quot: FutsModel) -> bool:
    """The canonical map onto ``quot`` preserves class sums for every state, label and block.

    Sums are accumulated over supports here, independently of :func:`quotient`.
    """
    rep_of = {}
    for b in partition.blocks:
        for s in b:
            rep_of[s] = b[0]
    if set(rep_of.values()) != set(quot.states) or quot.schemas != model.schemas:
        return False
    for sc in model.schemas:
        sr = sc.semiring
        for s in model.states:
            for label in sc.labels:
                acc = {}
                for t, v in model.theta(sc.index, s, label).items():
                    r = rep_of[t]
                    acc[r] = sr.add(acc.get(r, sr.zero), v)
                expected = {r: v for r, v in acc.items() if not sr.is_zero(v)}
                if expected != dict(quot.theta(sc.index, rep_of[s], label)):
                    return False
    return True


def minimize(model: FutsModel, backend: str = "auto") -> tuple[FutsModel, Partition]:
    p = coarsest_bisimulation(model, backend)
    return quotient(model, p), p


@dataclass(frozen=True)
class Witness:
    """Two states whose class sums differ at ``(relation, label, block)``."""

    left: object
    right: object
    relation: int
    label: object
    block: tuple
    left_value: object
    right_value: object

    def describe(self, dump=str, name=str) -> str:
        cls = "{" + ", ".join(map(name, self.block)) + "}"
        return (
            f"{name(self.left)} vs {name(self.right)}: relation {self.relation}, label {self.label}, "
            f"class {cls}: {dump(self.left_value)} vs {dump(self.right_value)}"
        )


def distinguish(model: FutsModel, s1, s2, partition: Partition | None = None, depth: int = 16) -> list[Witness]:
    """A chain of witnesses explaining why ``s1`` and ``s2`` are not bisimilar.

    The first entry shows a relation, label and class of the coarsest
    bisimulation on which the two states disagree.  Each later entry explains
    why a successor of one side differs from a successor of the other.  Empty
    when the states are bisimilar.
    """
    if partition is None:
        partition = coarsest_bisimulation(model)
    chain = []
    seen = set()
    while not partition.same(s1, s2) and (s1, s2) not in seen and len(chain) < depth:
        seen.add((s1, s2))
        found = _first_difference(model, partition, s1, s2)
        if found is None:  # pragma: no cover - contradicts coarseness
            raise AssertionError("non-bisimilar states with equal signatures")
        chain.append(found)
        nxt = _successor_pair(model, partition, found)
        if nxt is None:
            break
        s1, s2 = nxt
    return chain


def _first_difference(model, partition, s1, s2):
    for sc in model.schemas:
        for label in sc.labels:
            f1 = model.theta(sc.index, s1, label)
            f2 = model.theta(sc.index, s2, label)
            c1 = _class_sums(f1, partition)
            c2 = _class_sums(f2, partition)
            for k in sorted(set(c1) | set(c2)):
                v1 = c1.get(k, sc.semiring.zero)
                v2 = c2.get(k, sc.semiring.zero)
                if v1 != v2:
                    return Witness(s1, s2, sc.index, label, partition.blocks[k], v1, v2)
    return None


def _successor_pair(model, partition, w: Witness):
    block = set(w.block)
    f1 = model.theta(w.relation, w.left, w.label)
    f2 = model.theta(w.relation, w.right, w.label)
    for fa, fb, flip in ((f1, f2, False), (f2, f1, True)):
        inside = [t for t in fa if t in block]
        outside = [t for t in fb if t not in block]
        if inside and outside:
            return (outside[0], inside[0]) if flip else (inside[0], outside[0])
    return None
