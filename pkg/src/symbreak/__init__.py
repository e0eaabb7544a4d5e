"""Symmetry breaking for finite-domain CSPs.

Modules: ``perm`` (permutation groups, Schreier-Sims), ``csp`` (domains,
propagation, search, brute-force oracle), ``lex`` (lex-leader, LexChain and
DoubleLex propagators, completeness audits), ``reduction`` (1-in-3 SAT to
DoubleLex consistency) and ``cli``.
"""

from .csp import CspModel, oracle_dc, propagate_fixpoint, solve
from .lex import (DoubleLex, LexChain, LexLeq, MatrixModel, ValueLexLeader,
                  audit_completeness, doublelex_complete_check, doublelex_propagate,
                  lex_leader_from_generators, lexchain_propagate)
from .perm import (GeneratingSet, Permutation, closure, parse_generators, parse_perm,
                   schreier_sims)
from .reduction import Formula, build_instance, parse_formula, verify_equivalence

__version__ = "0.1.0"

__all__ = [
    "CspModel", "oracle_dc", "propagate_fixpoint", "solve",
    "DoubleLex", "LexChain", "LexLeq", "MatrixModel", "ValueLexLeader",
    "audit_completeness", "doublelex_complete_check", "doublelex_propagate",
    "lex_leader_from_generators", "lexchain_propagate",
    "GeneratingSet", "Permutation", "closure", "parse_generators", "parse_perm",
    "schreier_sims",
    "Formula", "build_instance", "parse_formula", "verify_equivalence",
]
