"""Closed-form solutions of constant-coefficient systems.

Run: python3 demos/02_solving.py
"""

from daekit import corpus_path, find_roots, parse_file, render, solve
from daekit.solver import FACTORIZATION, PARTIAL_FRACTIONS
from daekit.system import operator_det

s = parse_file(corpus_path("exp_forcing.dae")).system
print("complex exponential forcing:")
print(render(solve(s), "text").rstrip())

s = parse_file(corpus_path("repeated_root.dae")).system
print("\nrepeated root (note the t*exp(-t) mode):")
print(render(solve(s), "text").rstrip())

# symbolic parameters have to be fixed before solving
s = parse_file(corpus_path("const_forcing.dae")).system
vals = {"a": 1, "b": 2, "fo": 6}
for mode in (FACTORIZATION, PARTIAL_FRACTIONS):
    print(f"\nconst forcing, {mode}:")
    print(render(solve(s, mode, assignment=vals), "text", mode=mode).rstrip())

# the mass-spring pair: keep f1 symbolic, fix the rest
s = parse_file(corpus_path("massspring.dae")).system
unit = {"m1": 1, "m2": 1, "k1": 1, "k2": 1}
sol = solve(s, particular_only=True, assignment=unit)
print("\nmass-spring, particular part only:")
print(render(sol, "text").rstrip())

det = operator_det(s.subs(unit))
print("\ncharacteristic roots of", det)
for r in find_roots([c.num.const_value() for c in det.univariate_coeffs()]):
    print("  ", r.value, "multiplicity", r.multiplicity)
