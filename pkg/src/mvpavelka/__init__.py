"""Exact computations for Łukasiewicz logic and its expansions.

Submodules: :mod:`.syntax` (formulas, profiles, theories), :mod:`.algebra`
(standard semantics, identity checks, finite algebras and congruences),
:mod:`.calculus` (axiom schemes, proof checking, derived proofs),
:mod:`.degrees` (truth and proof degrees) and :mod:`.cli`.
"""

from .algebra import FiniteAlgebra, FiniteChain, enumerate_congruences, evaluate
from .calculus import Proof, check_proof, replay_prop33, search_proof, synthesize_ground_proof
from .degrees import (
    DegreeBounds, compactness_probe, pavelka_gap, proof_degree_lower,
    truth_degree_exact, truth_degree_grid,
)
from .syntax import LogicProfile, Theory, parse, to_core, to_text

__all__ = [
    "FiniteAlgebra", "FiniteChain", "enumerate_congruences", "evaluate",
    "Proof", "check_proof", "replay_prop33", "search_proof", "synthesize_ground_proof",
    "DegreeBounds", "compactness_probe", "pavelka_gap", "proof_degree_lower",
    "truth_degree_exact", "truth_degree_grid",
    "LogicProfile", "Theory", "parse", "to_core", "to_text",
]
__version__ = "0.1.0"
