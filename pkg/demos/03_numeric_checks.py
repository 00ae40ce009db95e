"""Numerical cross-checks of an analytic solution.

Residuals on a grid, then an independent RK4 integration from the same
initial state.  Set DAEKIT_SEED to change how the free constants are drawn.

Run: python3 demos/03_numeric_checks.py
"""

from daekit import Grid, check_solution, corpus_path, parse_file, residual_check, rk4_oracle, solve
from daekit.numcheck import default_rng, relate_constants

s = parse_file(corpus_path("massspring_damped.dae")).system
if s.params:
    s = s.subs({p: 1 for p in s.params})
sol = solve(s)
for v in s.dvars:
    print(v, "=", sol[v])

rep = check_solution(s, sol, rng=default_rng())
print("\ncheck_solution:", "PASS" if rep.passed else "FAIL", f"max residual {rep.max_residual:.2e}")

# same thing by hand on a finer grid
consts = relate_constants(s, sol, default_rng())
grid = Grid("t", 0.0, 5.0, 501)
print("residual on [0, 5]:", f"{residual_check(s, sol, consts, grid).max_residual:.2e}")
print("rk4 max deviation: ", f"{rk4_oracle(s, sol, consts, grid):.2e}")
