"""Symbolic calculus of biset presentations for bicritical branched coverings."""

from .biset import (
    BisetTable,
    base_biset,
    change_basis,
    check_consistency,
    postcompose,
    precompose,
    right_action,
)
from .dynamics import corollary_closure, lift, orbit_explore, verify_identity
from .freegroup import Word, are_conjugate, parse_word, reduce, solve_conjugacy_system
from .iso import IsoWitness, decide_iso, decide_iso_up_to_pretwist, verify_iso
from .mcg import Automorphism, TwistIndex, parse_mcg_word, twist, twist_generator

__version__ = "0.1.0"

__all__ = [
    "Automorphism",
    "BisetTable",
    "IsoWitness",
    "TwistIndex",
    "Word",
    "are_conjugate",
    "base_biset",
    "change_basis",
    "check_consistency",
    "corollary_closure",
    "decide_iso",
    "decide_iso_up_to_pretwist",
    "lift",
    "orbit_explore",
    "parse_mcg_word",
    "parse_word",
    "postcompose",
    "precompose",
    "reduce",
    "right_action",
    "solve_conjugacy_system",
    "twist",
    "twist_generator",
    "verify_identity",
    "verify_iso",
]
