"""Congruences of small MV-algebras, and when an expansion keeps them.

Run:  python demos/congruences.py
"""

from fractions import Fraction

from mvpavelka.algebra import (
    FiniteAlgebra, check_compatible_expansion, enumerate_congruences, mv_chain_algebra,
)

# Finite chains are simple: only the identity and the total relation.
for m in range(2, 6):
    print(f"L{m}: {len(enumerate_congruences(FiniteAlgebra.chain(m)))} congruences")

# A product has one congruence per pair of factor congruences.
prod = FiniteAlgebra.chain(2).product(FiniteAlgebra.chain(3))
print("\n".join(enumerate_congruences(prod).lines()))

# Adding the negation fixpoint 1/2 as a constant changes nothing ...
k3 = mv_chain_algebra(3, {"K": (0, lambda: Fraction(1, 2))})
print("L3 x L3 with K compatible:", check_compatible_expansion(k3.product(k3)))

# ... but an arbitrary unary operation can break a product congruence.
labels = [(x, y) for x in range(2) for y in range(3)]
twist = [labels.index((1 - x, y) if y == 2 else (x, y)) for x, y in labels]
print("L2 x L3 with a twisted operation compatible:",
      check_compatible_expansion(prod.expand("f", 1, twist)))
