"""loopforge: Cayley-Dickson loops and their multiplication groups.

Builds the loops Q_n in exact signed-generator arithmetic, realizes their
translations and inner mappings as explicit permutations, and mechanically
verifies the structure of Inn(Q_n), Mlt(Q_n) and the one-sided variants --
exhaustively for small n, by GF(2) rank arguments for larger n.
"""

from ._backend import BACKEND, USING_NUMBA
from .cdcore import LoopElement, associator, commutator, mul, parse_element
from .looptable import (
    CayleyTable,
    automorphism_group,
    cd_table,
    generate_subloop,
    isomorphic,
)
from .mltgroups import (
    build_K,
    build_N,
    inn_group,
    mlt_group,
    onesided_inn,
    onesided_mlt,
    verify_semidirect,
    verify_semidirect_onesided,
)
from .permgroup import FlipVector, GF2Basis, Permutation, closure, flip_decompose
from .verify import theorem_suite

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "USING_NUMBA",
    "CayleyTable",
    "FlipVector",
    "GF2Basis",
    "LoopElement",
    "Permutation",
    "associator",
    "automorphism_group",
    "build_K",
    "build_N",
    "cd_table",
    "closure",
    "commutator",
    "flip_decompose",
    "generate_subloop",
    "inn_group",
    "isomorphic",
    "mlt_group",
    "mul",
    "onesided_inn",
    "onesided_mlt",
    "parse_element",
    "theorem_suite",
    "verify_semidirect",
    "verify_semidirect_onesided",
    "__version__",
]
