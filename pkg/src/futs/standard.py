"""Helpers shared by the standard (multi-transition) semantics of both languages.

The refinement here works directly on per-state signatures computed from the
standard transition relations.  It is deliberately separate from the FuTS
refinement in :mod:`futs.bisim` so the correspondence checks compare two
independent computations.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Callable, Hashable, Iterable

from .errors import StateCapExceeded
from .model import Partition

DEFAULT_CAP = 10_000


def reachable(roots: Iterable[Hashable], successors: Callable[[Hashable], Iterable[Hashable]], cap: int) -> list:
    """Breadth-first closure of ``roots``; raises StateCapExceeded beyond ``cap`` states."""
    order = []
    seen = set()
    queue = deque()
    for r in roots:
        if r not in seen:
            seen.add(r)
            order.append(r)
            queue.append(r)
    if len(order) > cap:
        raise StateCapExceeded(cap, len(order))
    while queue:
        s = queue.popleft()
        for t in successors(s):
            if t not in seen:
                seen.add(t)
                order.append(t)
                if len(order) > cap:
                    raise StateCapExceeded(cap, len(order))
                queue.append(t)
    return order


def refine(states: list, signature: Callable[[Hashable, dict], Hashable]) -> Partition:
    """Coarsest partition stable under ``signature(state, block_of)``.

    ``signature`` must depend on the current partition only through the
    block numbers in ``block_of``.
    """
    block_of = {s: 0 for s in states}
    count = 1 if states else 0
    while True:
        keys = {}
        new = {}
        for s in states:
            k = (block_of[s], signature(s, block_of))
            new[s] = keys.setdefault(k, len(keys))
        if len(keys) == count:
            return Partition.from_labels(states, [block_of[s] for s in states])
        block_of, count = new, len(keys)
