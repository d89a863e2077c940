"""Bier posets, nested set complexes and shelling transport on small instances."""

__version__ = "0.1.0"

from .bier import bier_poset, verify_boolean_bier
from .errors import BierlabError, Timeout, VerificationFailed
from .homology import HomologyProfile, reduced_homology
from .labels import TOP, Blown, Interval, Plain, Primed
from .nested import (
    bier_subdivision_chain,
    canonical_bier_building_set,
    combinatorial_blowup,
    extend_building_set,
    is_building_set,
    nested_set_complex,
    chain_nested_isomorphism,
)
from .poset import Poset, boolean_lattice, enumerate_proper_ideals, order_complex
from .shelling import (
    bier_shelling_pipeline,
    check_condition_S,
    check_condition_T,
    check_recursive_coatom_ordering,
    find_shelling,
    transport_ordering,
)
from .simplicial import (
    SimplicialComplex,
    alexander_dual,
    deleted_join_bier,
    face_lattice,
    face_poset,
    stellar_subdivision,
)

__all__ = [
    "__version__",
    "alexander_dual",
    "bier_poset",
    "bier_shelling_pipeline",
    "bier_subdivision_chain",
    "BierlabError",
    "Blown",
    "boolean_lattice",
    "canonical_bier_building_set",
    "chain_nested_isomorphism",
    "check_condition_S",
    "check_condition_T",
    "check_recursive_coatom_ordering",
    "combinatorial_blowup",
    "deleted_join_bier",
    "enumerate_proper_ideals",
    "extend_building_set",
    "face_lattice",
    "face_poset",
    "find_shelling",
    "HomologyProfile",
    "Interval",
    "is_building_set",
    "nested_set_complex",
    "order_complex",
    "Plain",
    "Poset",
    "Primed",
    "reduced_homology",
    "SimplicialComplex",
    "stellar_subdivision",
    "Timeout",
    "TOP",
    "transport_ordering",
    "VerificationFailed",
    "verify_boolean_bier",
]
