"""Numerical verification: grid residuals, an RK4 oracle, finite differences."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .errors import NotReducible
from .expfunc import ConstSymbol, ExpPoly
from .operators import OperatorPoly, apply_operator, is_op_symbol
from .system import as_operator


@dataclass(frozen=True)
class Grid:
    ivar: str = "t"
    start: float = 0.0
    stop: float = 1.0
    points: int = 101

    def __post_init__(self):
        if not self.start < self.stop:
            raise ValueError("grid needs start < stop")
        if self.points < 2:
            raise ValueError("grid needs at least two points")

    def values(self):
        return np.linspace(self.start, self.stop, self.points)


@dataclass
class ResidualReport:
    row_max: list
    grid: Grid
    tol: float
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = all(m <= self.tol for m in self.row_max)

    @property
    def max_residual(self):
        return max(self.row_max, default=0.0)

    def to_dict(self):
        return {
            "rows": [float(m) for m in self.row_max],
            "max": float(self.max_residual),
            "tol": self.tol,
            "passed": self.passed,
            "grid": {"ivar": self.grid.ivar, "start": self.grid.start,
                     "stop": self.grid.stop, "points": self.grid.points},
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def default_rng(seed=None):
    if seed is None:
        seed = int(os.environ.get("DAEKIT_SEED", "0"))
    return np.random.default_rng(seed)


def _points(s, grid):
    pts = {grid.ivar: grid.values()}
    for v in s.ivars:
        if v not in pts:
            # remaining independent variables ride along the same abscissa
            pts[v] = grid.values()
    return pts


def row_residuals(s, solution):
    """Symbolic ``sum_j M_ij x_j - f_i`` for every row (constants kept)."""
    rows = []
    for i, row in enumerate(s.matrix):
        acc = ExpPoly(s.ivars)
        for j, e in enumerate(row):
            if not e.is_zero():
                acc = acc + apply_operator(as_operator(e), solution[s.dvars[j]].with_ivars(s.ivars))
        f = s.forcing[i]
        rows.append(acc - f.with_ivars(s.ivars))
    return rows


def residual_check(s, solution, const_assignment=None, grid=None, tol=1e-8):
    """Evaluate every constitutive row on a grid after exact differentiation."""
    grid = grid or Grid(s.ivars[0])
    assignment = dict(const_assignment or {})
    pts = _points(s, grid)
    maxes = []
    for r in row_residuals(s, solution):
        vals = r.evaluate_grid(pts, assignment)
        maxes.append(float(np.max(np.abs(vals))) if len(vals) else 0.0)
    return ResidualReport(maxes, grid, tol)


def solution_constants(solution):
    out = []
    for x in solution.values():
        for c in sorted(x.constants(), key=lambda c: c.sort_key):
            if c not in out:
                out.append(c)
    return out


def _coeff_vector(rows, keys, assignment):
    vec = []
    for r, ks in zip(rows, keys):
        for k in ks:
            c = r.terms.get(k)
            vec.append(0j if c is None else c.evaluate(assignment))
    return np.array(vec, dtype=complex)


def relate_constants(s, solution, rng=None, params=None):
    """Assignment of every integration constant making the system residual vanish.

    Constants of different variables come out unrelated; the residual is
    affine in them, so the consistent ones form an affine subspace.  A
    point of that subspace is chosen with free coordinates in [-1, 1].
    """
    rng = rng if rng is not None else default_rng()
    params = dict(params or {})
    consts = solution_constants(solution)
    rows = row_residuals(s, solution)
    keys = [sorted(r.terms, key=repr) for r in rows]
    zero = {c: 0 for c in consts}
    base = _coeff_vector(rows, keys, {**params, **zero})
    if not consts:
        return {}
    cols = []
    for c in consts:
        a = dict(zero)
        a[c] = 1
        cols.append(_coeff_vector(rows, keys, {**params, **a}) - base)
    A = np.array(cols, dtype=complex).T if len(base) else np.zeros((0, len(consts)))
    if A.shape[0] == 0:
        vals = rng.uniform(-1, 1, len(consts))
        return dict(zip(consts, vals))
    x0, *_ = np.linalg.lstsq(A, -base, rcond=None)
    _, sv, vh = np.linalg.svd(A)
    rank = int(np.sum(sv > 1e-10 * max(sv.max(), 1.0))) if len(sv) else 0
    null = vh[rank:].conj().T
    if null.shape[1]:
        z = rng.uniform(-1, 1, null.shape[1])
        x = x0 + null @ z
    else:
        x = x0
    x = [complex(v) for v in x]
    return {c: (v.real if abs(v.imag) < 1e-14 else v) for c, v in zip(consts, x)}


def random_constants(solution, rng=None):
    rng = rng if rng is not None else default_rng()
    consts = solution_constants(solution)
    return dict(zip(consts, rng.uniform(-1, 1, len(consts))))


def check_solution(s, solution, tol=None, grid=None, rng=None, params=None):
    """Residual check with related constants and any forcing parameters bound."""
    params = dict(params or {})
    for f in s.forcing:
        for sym in set().union(*[c.symbols() for c in f.terms.values()] or [set()]):
            if not isinstance(sym, ConstSymbol) and sym not in params:
                params[sym] = 1.0
    for x in solution.values():
        for c in x.terms.values():
            for sym in c.symbols():
                if not isinstance(sym, ConstSymbol) and sym not in params:
                    params[sym] = 1.0
    a = relate_constants(s, solution, rng, params)
    if tol is None:
        exact = all(x.is_exact() for x in solution.values())
        tol = 1e-8 if exact else 1e-6
    return residual_check(s, solution, {**params, **a}, grid, tol)


# -- fixed-step integrator -----------------------------------------------------

def _numeric(rf):
    if rf.is_zero():
        return 0j
    if rf.den or not rf.num.is_const():
        raise NotReducible("system coefficients must be numeric")
    return complex(rf.num.const_value())


def _explicit_form(s):
    n = s.n
    ops = [[as_operator(e) for e in row] for row in s.matrix]
    if len(s.ivars) != 1:
        raise NotReducible("integrator oracle handles one independent variable")
    opvar = s.opvars()[0]
    orders = []
    for j in range(n):
        orders.append(max((ops[i][j].degree(opvar) for i in range(n) if not ops[i][j].is_zero()),
                          default=0))
    coeff = np.zeros((n, n, max(orders) + 1), dtype=complex)
    for i in range(n):
        for j in range(n):
            p = ops[i][j]
            if p.is_zero():
                continue
            if any(not is_op_symbol(x) for x in p.rf.symbols()):
                raise NotReducible("system coefficients must be numeric")
            for d, c in enumerate(p.univariate_coeffs(opvar)):
                coeff[i, j, d] = _numeric(c)
    L = np.array([[coeff[i, j, orders[j]] for j in range(n)] for i in range(n)])
    if abs(np.linalg.det(L)) < 1e-12 * max(1.0, np.abs(L).max() ** n):
        raise NotReducible(
            "leading coefficient matrix is singular; the system needs index reduction")
    return orders, coeff, np.linalg.inv(L)


def rk4_oracle(s, analytic, const_assignment=None, grid=None):
    """Max deviation between RK4 integration and the analytic solution."""
    grid = grid or Grid(s.ivars[0], 0.0, 1.0, 1001)
    assignment = dict(const_assignment or {})
    orders, coeff, Linv = _explicit_form(s)
    n = s.n
    iv = s.ivars[0]
    ts = grid.values()
    h = ts[1] - ts[0]
    half = np.linspace(grid.start, grid.stop, 2 * grid.points - 1)
    forcing = np.array([f.with_ivars(s.ivars).evaluate_grid({iv: half}, assignment)
                        for f in s.forcing])
    x_an = [analytic[v].with_ivars(s.ivars) for v in s.dvars]
    slots = [(j, d) for j in range(n) for d in range(orders[j])]
    y = []
    for j, d in slots:
        g = x_an[j]
        for _ in range(d):
            g = g.diff(iv)
        y.append(g.evaluate({iv: grid.start}, assignment))
    y = np.array(y, dtype=complex)
    index = {sd: k for k, sd in enumerate(slots)}

    def highest(state, fvec):
        rhs = fvec.astype(complex).copy()
        for (j, d), k in index.items():
            rhs -= coeff[:, j, d] * state[k]
        return Linv @ rhs

    def deriv(state, fvec):
        top = highest(state, fvec)
        out = np.empty_like(state)
        for (j, d), k in index.items():
            out[k] = state[index[(j, d + 1)]] if d + 1 < orders[j] else top[j]
        return out, top

    values = np.array([xa.evaluate_grid({iv: ts}, assignment) for xa in x_an])
    dev = 0.0

    def dvar_values(state, fvec):
        top = highest(state, fvec)
        return np.array([state[index[(j, 0)]] if orders[j] else top[j] for j in range(n)])

    dev = max(dev, float(np.max(np.abs(dvar_values(y, forcing[:, 0]) - values[:, 0]))))
    for step in range(grid.points - 1):
        f0, fm, f1 = forcing[:, 2 * step], forcing[:, 2 * step + 1], forcing[:, 2 * step + 2]
        k1, _ = deriv(y, f0)
        k2, _ = deriv(y + h / 2 * k1, fm)
        k3, _ = deriv(y + h / 2 * k2, fm)
        k4, _ = deriv(y + h * k3, f1)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        cur = dvar_values(y, f1)
        dev = max(dev, float(np.max(np.abs(cur - values[:, step + 1]))))
    return dev


# -- finite differences -----------------------------------------------------------

def _central_kth(fn, x, k, h):
    if k == 0:
        return fn(x)
    total = 0j
    for j in range(k + 1):
        total += (-1) ** j * comb(k, j) * fn(x + (k / 2 - j) * h)
    return total / h ** k


def finite_diff_check(p, f, at, h=1e-3):
    """|apply_operator(p, f)(at) - Richardson-extrapolated central differences|."""
    p = p if isinstance(p, OperatorPoly) else OperatorPoly(p)
    iv = f.ivars[0] if f.ivars else "t"
    exact = apply_operator(p, f).evaluate({iv: at}) if f.ivars else complex(0)
    opvar = p.opvars[0] if p.opvars else "D_" + iv
    cs = p.univariate_coeffs(opvar)

    def fn(x):
        return f.evaluate({iv: x})

    approx = 0j
    for k, c in enumerate(cs):
        cv = _numeric(c)
        if not cv:
            continue
        if k == 0:
            approx += cv * fn(at)
            continue
        coarse = _central_kth(fn, at, k, h)
        fine = _central_kth(fn, at, k, h / 2)
        approx += cv * (4 * fine - coarse) / 3
    return abs(exact - approx)


__all__ = [
    "Grid",
    "ResidualReport",
    "residual_check",
    "relate_constants",
    "random_constants",
    "check_solution",
    "rk4_oracle",
    "finite_diff_check",
    "row_residuals",
]
