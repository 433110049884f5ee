"""Integer encoding of a model and backend selection for the refinement round.

Rational weights are scaled by the least common multiple of all denominators,
booleans become 1; class sums then compare exactly as integers (boolean keys
are clamped to 1, i.e. disjunction).  The compiled kernel is used when it is
importable and every per-row sum fits comfortably in int64; otherwise the
pure-Python round runs on unbounded ints.

Set ``FUTS_PURE_PYTHON=1`` to disable the compiled kernel.
"""

from __future__ import annotations

import functools
import logging
import math
import os
from dataclasses import dataclass

from . import _refine_py
from .model import FutsModel
from .semiring import BOOLEAN

log = logging.getLogger(__name__)

try:
    if os.environ.get("FUTS_PURE_PYTHON"):
        raise ImportError("disabled by FUTS_PURE_PYTHON")
    from . import _kernel  # type: ignore[attr-defined]
except ImportError as exc:  # pragma: no cover - depends on the build
    _kernel = None
    log.debug("compiled refinement kernel unavailable: %s", exc)

HAVE_COMPILED = _kernel is not None
INT64_SAFE = 1 << 62


@dataclass
class Encoded:
    row_ptr: list
    keys: list
    targets: list
    weights: list
    is_bool_key: list
    key_of: dict  # (relation index, label) -> key id
    scale: int
    max_row_sum: int

    @property
    def fits_int64(self) -> bool:
        return self.max_row_sum < INT64_SAFE

    @functools.cached_property
    def arrays(self):
        """Contiguous int64 / uint8 copies for the compiled kernel, built once."""
        import numpy as np

        return (
            np.asarray(self.row_ptr, dtype=np.int64),
            np.asarray(self.keys, dtype=np.int64),
            np.asarray(self.targets, dtype=np.int64),
            np.asarray(self.weights, dtype=np.int64),
            np.asarray(self.is_bool_key, dtype=np.uint8),
        )


def encode(model: FutsModel) -> Encoded:
    key_of = {}
    is_bool_key = []
    for sc in model.schemas:
        for label in sc.labels:
            key_of[(sc.index, label)] = len(is_bool_key)
            is_bool_key.append(sc.semiring is BOOLEAN)

    scale = 1
    for sc, _s, _label, fn in model.rows():
        if sc.semiring is not BOOLEAN:
            for v in fn.values():
                scale = math.lcm(scale, v.denominator)

    idx = model.index
    row_ptr = [0]
    keys, targets, weights = [], [], []
    max_row_sum = 0
    per_state = {s: [] for s in model.states}
    for sc, s, label, fn in model.rows():
        per_state[s].append((key_of[(sc.index, label)], sc.semiring is BOOLEAN, fn))
    for s in model.states:
        for key, boolean, fn in per_state[s]:
            row_sum = 0
            for t, v in fn.items():
                w = 1 if boolean else v.numerator * (scale // v.denominator)
                keys.append(key)
                targets.append(idx[t])
                weights.append(w)
                row_sum += w
            max_row_sum = max(max_row_sum, row_sum)
        row_ptr.append(len(keys))
    return Encoded(row_ptr, keys, targets, weights, is_bool_key, key_of, scale, max_row_sum)


def refine_round(enc: Encoded, blocks, nblocks: int, backend: str = "auto"):
    """One splitting round; ``backend`` is ``auto``, ``compiled`` or ``python``."""
    if backend == "auto":
        backend = "compiled" if HAVE_COMPILED and enc.fits_int64 else "python"
    if backend == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled kernel not built")
        if not enc.fits_int64:
            raise OverflowError("model weights exceed the int64 kernel range")
        out, count = _kernel.refine_round(*enc.arrays, blocks, nblocks)
        return out.tolist(), count
    if backend == "python":
        return _refine_py.refine_round(
            enc.row_ptr, enc.keys, enc.targets, enc.weights, enc.is_bool_key, list(blocks), nblocks
        )
    raise ValueError(f"unknown backend {backend!r}")
