"""Proofs in the graded calculus: checking, searching and synthesizing.

Run:  python demos/proofs.py
"""

from mvpavelka.calculus import (
    SearchBudget, check_proof, format_proof, replay_prop33, search_proof,
    synthesize_ground_proof,
)
from mvpavelka.degrees import pavelka_gap, proof_degree_lower
from mvpavelka.syntax import LogicProfile, Theory, parse

# Monotonicity of the product, as a fully checkable derivation.
mono = replay_prop33(parse("p"), parse("q"), parse("r"))
print(format_proof(mono))
print("\n".join(check_proof(mono).lines()), "\n")

# Forward search finds short proofs from hypotheses.
theory = Theory((parse("[1/2] -> p"), parse("p -> q")), LogicProfile.parse("base,constants"))
found = search_proof(parse("[1/2] -> q"), theory)
print(format_proof(found))

# Variable-free formulas: the book-keeping axioms prove [v] -> phi at the exact value v.
ground = synthesize_ground_proof(parse("[1/2] + d2([1/3])"))
print(f"ground proof of {ground.conclusion}: {len(ground)} steps,",
      check_proof(ground).lines()[0], "\n")

# Proof degree lower bound against truth degree.  The search is bounded, so
# the second formula shows a gap: it holds to degree 1/2 but no proof is found.
for text, gens in [("q", ["[1/2] -> p", "p -> q"]), ("p -> (p & p)", [])]:
    low = proof_degree_lower(parse(text), [parse(g) for g in gens], SearchBudget(max_steps=2000))
    print(f"{text} from {gens}: proof degree >= {low.lo}")
    print("  " + "\n  ".join(pavelka_gap(parse(text), [parse(g) for g in gens],
                                         SearchBudget(max_steps=2000)).lines()))
