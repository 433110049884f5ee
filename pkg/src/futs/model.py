"""Total and deterministic FuTS over a finite, explicitly listed state set."""

from __future__ import annotations

from collections.abc import Callable, Hashable, Iterable, Sequence
from dataclasses import dataclass

from .errors import ModelError
from .semiring import FiniteSupportFn, Semiring


@dataclass(frozen=True)
class RelationSchema:
    """One state-to-function transition relation: its index, labels and semiring."""

    index: int
    labels: tuple
    semiring: Semiring

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        if not self.labels:
            raise ModelError("schema", f"relation {self.index} has no labels")
        if len(set(self.labels)) != len(self.labels):
            raise ModelError("schema", f"relation {self.index} has duplicate labels")


class FutsModel:
    """A FuTS ``(S, <theta_i>)`` restricted to a finite state set.

    ``table[(i, s, label)]`` is the unique continuation of ``s`` under ``label``
    in relation ``i``.  Every triple is present; "no transition" is stored as
    the zero function.  Instances are treated as immutable.
    """

    def __init__(self, states: Sequence[Hashable], schemas: Sequence[RelationSchema], table: dict):
        self.states = tuple(states)
        self.schemas = tuple(schemas)
        self.table = table
        self.index = {s: k for k, s in enumerate(self.states)}
        self._validate()

    def _validate(self):
        if len(self.index) != len(self.states):
            raise ModelError("schema", "duplicate state ids")
        indices = [sc.index for sc in self.schemas]
        if len(set(indices)) != len(indices):
            raise ModelError("schema", "duplicate relation indices")
        expected = 0
        for sc in self.schemas:
            for s in self.states:
                for label in sc.labels:
                    fn = self.table.get((sc.index, s, label))
                    if fn is None:
                        raise ModelError(
                            "totality", f"no continuation for state {s!r}, relation {sc.index}, label {label!r}"
                        )
                    if fn.semiring is not sc.semiring:
                        raise ModelError(
                            "tag-mismatch",
                            f"row ({sc.index}, {s!r}, {label!r}) is over {fn.semiring.name}, "
                            f"relation is over {sc.semiring.name}",
                        )
                    for t in fn:
                        if t not in self.index:
                            raise ModelError("open-model", f"row ({sc.index}, {s!r}, {label!r}) reaches unknown state {t!r}")
                    expected += 1
        if len(self.table) != expected:
            raise ModelError("schema", "table holds rows for unknown relations, states or labels")

    def theta(self, i: int, s, label) -> FiniteSupportFn:
        return self.table[(i, s, label)]

    def rows(self):
        """Yield ``(schema, state, label, fn)`` in canonical order."""
        for sc in self.schemas:
            for s in self.states:
                for label in sc.labels:
                    yield sc, s, label, self.table[(sc.index, s, label)]

    def schema(self, i: int) -> RelationSchema:
        for sc in self.schemas:
            if sc.index == i:
                return sc
        raise KeyError(i)

    def __len__(self):
        return len(self.states)

    def __eq__(self, other):
        if not isinstance(other, FutsModel):
            return NotImplemented
        return self.states == other.states and self.schemas == other.schemas and self.table == other.table

    def __repr__(self):
        return f"FutsModel({len(self.states)} states, {len(self.schemas)} relations)"


def build_futs(
    states: Iterable[Hashable],
    schemas: Sequence[RelationSchema],
    evaluator: Callable[[int, Hashable, Hashable], FiniteSupportFn],
) -> FutsModel:
    """Materialize every ``(i, state, label)`` row by calling ``evaluator``."""
    states = tuple(states)
    table = {}
    for sc in schemas:
        for s in states:
            for label in sc.labels:
                table[(sc.index, s, label)] = evaluator(sc.index, s, label)
    return FutsModel(states, schemas, table)


class Partition:
    """A partition of a model's states into disjoint non-empty blocks.

    Blocks are stored as tuples; equality ignores block and member order.
    """

    __slots__ = ("blocks", "_block_of")

    def __init__(self, blocks: Iterable[Iterable[Hashable]]):
        self.blocks = tuple(tuple(b) for b in blocks)
        self._block_of = {}
        for k, b in enumerate(self.blocks):
            if not b:
                raise ModelError("partition-mismatch", "empty block")
            for s in b:
                if s in self._block_of:
                    raise ModelError("partition-mismatch", f"state {s!r} occurs in two blocks")
                self._block_of[s] = k

    @classmethod
    def from_labels(cls, states: Sequence, labels: Sequence[int]) -> "Partition":
        """Blocks from a per-state block number, ordered by first member."""
        order = {}
        groups = []
        for s, b in zip(states, labels):
            if b not in order:
                order[b] = len(groups)
                groups.append([])
            groups[order[b]].append(s)
        return cls(groups)

    @classmethod
    def discrete(cls, states: Iterable) -> "Partition":
        return cls([s] for s in states)

    def block_of(self, s) -> int:
        return self._block_of[s]

    def block(self, s) -> tuple:
        return self.blocks[self._block_of[s]]

    def same(self, s, t) -> bool:
        return self._block_of[s] == self._block_of[t]

    def states(self) -> frozenset:
        return frozenset(self._block_of)

    def as_sets(self) -> frozenset:
        return frozenset(frozenset(b) for b in self.blocks)

    def check_against(self, model: FutsModel):
        if self.states() != frozenset(model.states):
            raise ModelError("partition-mismatch", "partition does not cover exactly the model's states")

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.as_sets() == other.as_sets()

    def __hash__(self):
        return hash(self.as_sets())

    def __repr__(self):
        return "Partition(" + ", ".join("{" + ", ".join(map(str, b)) + "}" for b in self.blocks) + ")"
