"""Governing equations: eliminate all but one unknown from a DAE system.

Run: python3 demos/01_governing.py
"""

from daekit import corpus_path, govern, governing_via_determinant, parse_file, render
from daekit.system import operator_det

# a fully symbolic 2x2 system: entries are opaque operators P_ij(D)
s = parse_file(corpus_path("generic_2x2.dae")).system
g = govern(s, "x2")
print("generic 2x2:")
print("  ", render(g, "text", opaque=s.opaque).rstrip())
print("  ", render(g, "latex", opaque=s.opaque).rstrip())

# the determinant route gives the same left side
print("   det route agrees:", governing_via_determinant(s, "x2").lhs == g.lhs)

# two coupled lines, normalized to a monic quartic in D_x
s = parse_file(corpus_path("coupled_tl.dae")).system
print("\ncoupled lines, target Vb:")
print("  ", render(govern(s, "Vb", monic=True), "text").rstrip())

# a PDE: the int row gets multiplied through by D_t before elimination
s = parse_file(corpus_path("pde_tl.dae")).system
print("\ntelegraph-type line:")
print("   det M =", operator_det(s))
print("  ", render(govern(s, "v"), "text").rstrip())

# variable coefficients work when only the last column carries them
s = parse_file(corpus_path("tl_vc.dae")).system
print("\nvariable-coefficient line, target V:")
print("  ", render(govern(s, "V"), "text").rstrip())
