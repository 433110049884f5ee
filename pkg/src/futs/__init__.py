"""Labelled state-to-function transition systems (FuTS) over semirings.

PEPA and IML front-ends, their FuTS and standard semantics, and a
bisimulation / minimization engine.
"""

from .bisim import (
    brute_force_coarsest,
    check_homomorphism,
    coarsest_bisimulation,
    distinguish,
    is_bisimulation,
    minimize,
    quotient,
)
from .errors import FutsError, ModelError, PairingCollision, ParseError, SemiringMismatch, StateCapExceeded
from .kernels import HAVE_COMPILED
from .model import FutsModel, Partition, RelationSchema, build_futs
from .semiring import BOOLEAN, RATIONAL, FiniteSupportFn, Semiring
from .serialize import export_futs, import_futs, to_dot

__version__ = "0.1.0"

__all__ = [
    "BOOLEAN",
    "HAVE_COMPILED",
    "RATIONAL",
    "FiniteSupportFn",
    "FutsError",
    "FutsModel",
    "ModelError",
    "PairingCollision",
    "ParseError",
    "Partition",
    "RelationSchema",
    "Semiring",
    "SemiringMismatch",
    "StateCapExceeded",
    "brute_force_coarsest",
    "build_futs",
    "check_homomorphism",
    "coarsest_bisimulation",
    "distinguish",
    "export_futs",
    "import_futs",
    "is_bisimulation",
    "minimize",
    "quotient",
    "to_dot",
]
