"""How true is p -> (p & p)?  Regions, exact degrees and grid bounds.

Run:  python demos/truth_degrees.py
"""

from fractions import Fraction

from mvpavelka.degrees import compile_pl, truth_degree_exact, truth_degree_grid
from mvpavelka.syntax import parse

phi = parse("p -> (p & p)")

# The value of phi is piecewise linear; each piece is an exact polyhedron.
system = compile_pl(phi)
print(f"{len(system)} regions for {phi}:")
for region in system.regions:
    cons = " and ".join(f"{a.text(system.variables)} >= 0" for a, _ in region.constraints)
    print(f"  value {region.objective.text(system.variables):8} where {cons}")

# Minimising over the pieces gives the exact infimum and where it is reached.
print(truth_degree_exact(phi).summary())

# A theory restricts the valuations: here p + p must be fully true.
theory = [parse("p + p")]
print("given p + p:", truth_degree_exact(parse("p"), theory).summary())

# Products leave the piecewise-linear world; the grid gives certified bounds.
bounds = truth_degree_grid(parse("p * (q -> p)"), [parse("q")], eps=Fraction(1, 50))
print(bounds.summary())
print(" ", bounds.note)
