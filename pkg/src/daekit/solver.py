"""Full analytic solutions by operator-matrix inversion.

For each dependent variable ``x_i = sum_j h_{j;i}(D) f_j``.  Every
``h_{j;i}`` is brought over the common denominator ``Q_i`` so that
``Q_i(D) x_i = phi_i`` with ``phi_i = sum_j P_{j;i}(D) f_j``, and
``1/Q_i`` is applied either as a chain of first-order inverses
``e^{rt} int e^{-rt} (.) dt`` over the roots of ``Q_i`` (the default,
valid for repeated roots) or through a partial-fraction expansion.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    RepeatedRoots,
    SingularSystem,
    SymbolicCoefficientsRemain,
    SymbolicCoefficientUnsupported,
)
from .expfunc import ConstPool, ConstSymbol, ExpPoly, _exp_close, apply_inverse_first_order
from .operators import OperatorPoly, apply_operator, is_op_symbol, op_ivar
from .roots import _divmod, _gcd, _trim, roots_of_operator
from .scalar import ONE, ZERO, GaussQ, Poly, RatFunc, _factor_lcm, _prod, is_exact
from .system import ForcingSymbol, as_operator, validate_system

FACTORIZATION = "factorization"
PARTIAL_FRACTIONS = "partial_fractions"
SEPARABILITY_TRIALS = 3
SEPARABILITY_SEED = 20240601


# -- inversion ----------------------------------------------------------------

@dataclass
class OperatorInverse:
    """``entries[i][j]`` is ``h_{j;i}``: the operator taking ``f_j`` into ``x_i``."""

    entries: list
    opvars: tuple
    dvars: tuple = ()

    def h(self, j, i):
        return self.entries[i][j]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def check(self, s):
        """True when ``M * inverse`` is the identity (expansion equality)."""
        n = len(self.entries)
        M = [[as_operator(e).rf for e in row] for row in s.matrix]
        for r in range(n):
            for c in range(n):
                acc = RatFunc.coerce(0)
                for k in range(n):
                    acc = acc + M[r][k] * self.entries[k][c]
                if not (acc == (1 if r == c else 0)):
                    return False
        return True


def _op_degree(rf, opvars):
    d = rf.num.degree(opvars)
    for f in rf.den:
        d -= f.degree(opvars)
    return d


def invert_operator_matrix(s):
    """Gauss-Jordan inversion of ``M(D)`` over the operator fraction field."""
    kind = validate_system(s)
    if kind.is_vc:
        raise SymbolicCoefficientUnsupported("inversion needs constant coefficients")
    n = s.n
    ov = s.opvars()
    opset = set(ov)
    zero, one = RatFunc.coerce(0), RatFunc.coerce(1)
    A = [[as_operator(e).rf for e in row] + [one if j == i else zero for j in range(n)]
         for i, row in enumerate(s.matrix)]
    for k in range(n):
        cands = [r for r in range(k, n) if not A[r][k].is_zero()]
        if not cands:
            raise SingularSystem(f"no pivot available in column {k + 1}")
        best = min(cands, key=lambda r: (_op_degree(A[r][k], opset), r))
        A[k], A[best] = A[best], A[k]
        piv = A[k][k]
        A[k] = [x / piv if not x.is_zero() else x for x in A[k]]
        for r in range(n):
            if r == k or A[r][k].is_zero():
                continue
            m = A[r][k]
            A[r] = [A[r][j] - m * A[k][j] if not A[k][j].is_zero() else A[r][j]
                    for j in range(2 * n)]
    return OperatorInverse([row[n:] for row in A], ov, s.dvars)


# -- partial fractions -------------------------------------------------------------

@dataclass
class PartialFractionDecomposition:
    """``1/P(D) = sum gamma / (D + alpha)`` over the simple roots ``-alpha``."""

    terms: list
    source_poly: object = None

    def recombine_residual(self, coeffs):
        """Max coefficient of ``P * sum gamma/(D+alpha) - 1`` (0 for exact input)."""
        roots = [-a for _, a in self.terms]
        total = [ZERO] * len(roots)
        for i, (g, _) in enumerate(self.terms):
            prod = [ONE]
            for j, r in enumerate(roots):
                if j != i:
                    prod = _mul_lists(prod, [-r, ONE])
            for k, c in enumerate(prod):
                total[k] = total[k] + g * c * coeffs[-1]
        total[0] = total[0] - 1
        return max((abs(complex(x)) for x in total), default=0.0)


def _mul_lists(a, b):
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def _eval_list(c, x):
    acc = ZERO if is_exact(x) and all(is_exact(a) for a in c) else 0j
    for a in reversed(c):
        acc = acc * x + a
    return acc


def partial_fractions(p, roots):
    """Simple-root partial fractions ``gamma_i = 1/P'(r_i)``."""
    if not roots.is_simple():
        rep = [str(r.value) for r in roots if r.multiplicity > 1]
        raise RepeatedRoots(
            f"partial fractions need simple roots; repeated: {', '.join(rep)} "
            "(use the factorization mode)")
    coeffs = roots.coeffs
    dc = [coeffs[k] * k for k in range(1, len(coeffs))]
    terms = []
    for r in roots:
        d = _eval_list(dc, r.value)
        g = (ONE / d) if is_exact(d) else 1 / complex(d)
        terms.append((g, -r.value))
    return PartialFractionDecomposition(terms, p)


# -- solution assembly -----------------------------------------------------------

@dataclass
class VariableSolution:
    dvar: str
    Q: object
    phi: ExpPoly
    roots: object
    solution: ExpPoly
    particular: ExpPoly
    constants: list = field(default_factory=list)


class SolutionSet(dict):
    """``dvar -> ExpPoly`` with per-variable details in ``.details``."""

    def __init__(self, *args, **kw):
        super().__init__(*args, **kw)
        self.details = {}
        self.inverse = None


def _require_numeric(s):
    for i, row in enumerate(s.matrix):
        for j, e in enumerate(row):
            rf = as_operator(e).rf
            extra = {x for x in rf.symbols() if not is_op_symbol(x)}
            if extra:
                raise SymbolicCoefficientsRemain(
                    f"entry ({i + 1},{j + 1}) depends on {sorted(map(str, extra))}; "
                    "assign numeric values first")


def _require_concrete(s):
    for i, f in enumerate(s.forcing):
        if isinstance(f, ForcingSymbol):
            raise SymbolicCoefficientsRemain(
                f"forcing {f} of row {i + 1} is an opaque function; "
                "supply an exponential-polynomial forcing")


def _ulist(p, opvar):
    if p.is_zero():
        return []
    return _trim(p.univariate_coeffs(opvar))


def _lists_to_poly(c, opvar):
    out = Poly()
    for k, a in enumerate(c):
        if a:
            out = out + Poly.symbol(opvar, k).scale(a) if k else out + Poly.const(a)
    return out


def _exact_list(c):
    return all(is_exact(x) for x in c)


def _reduce_entry(rf, opvar):
    """Numerator / denominator lists of a univariate entry, gcd-reduced when exact."""
    n = _ulist(rf.num, opvar)
    d = _ulist(rf.den_poly(), opvar)
    if n and _exact_list(n) and _exact_list(d) and len(d) > 1:
        g = _gcd(n, d)
        if len(g) > 1:
            n, _ = _divmod(n, g)
            d, _ = _divmod(d, g)
    return n, d


def _lcm_lists(a, b):
    if _exact_list(a) and _exact_list(b):
        g = _gcd(a, b)
        q, _ = _divmod(a, g)
        out = _mul_lists(q, b)
        return [x / out[-1] for x in out]
    return _mul_lists(a, b)


def _chain(roots, phi, ivar, pool):
    x = phi
    for r in roots.chain():
        x = apply_inverse_first_order(-r, x, ivar, pool, True)
    lc = roots.leading
    return x.scale(ONE / lc if is_exact(lc) else 1 / complex(lc))


def _via_partial_fractions(Qop, roots, phi, ivar, pool):
    pfd = partial_fractions(Qop, roots)
    lc = roots.leading
    out = ExpPoly(phi.ivars)
    for g, a in pfd.terms:
        gl = g * lc if is_exact(g) and is_exact(lc) else complex(g) * complex(lc)
        out = out + apply_inverse_first_order(a, phi, ivar, pool, True).scale(gl)
    scale = ONE / lc if is_exact(lc) else 1 / complex(lc)
    return out.scale(scale)


def _key_order(key):
    pw, ex = key
    return tuple((complex(a).real, complex(a).imag) for a in ex) + pw


def absorb_constants(x, pool):
    """Replace every constant-bearing (powers, exponents) group by one fresh ``C_k``."""
    keep = ExpPoly(x.ivars)
    ckeys = []
    for key, c in x.terms.items():
        if any(isinstance(s, ConstSymbol) for s in c.symbols()):
            ckeys.append(key)
        else:
            keep._accumulate(key[0], key[1], c)
    ckeys.sort(key=_key_order)
    consts = []
    for pw, ex in ckeys:
        k = pool.fresh("complementary")
        consts.append(k)
        keep._accumulate(pw, ex, Poly.symbol(k))
    return keep, consts, ckeys


def _shift_coeffs(q, c):
    """Ascending coefficients of ``Q(D + c)``."""
    n = len(q)
    out = [ZERO] * n
    for j in range(n):
        binom = 1
        power = ONE
        # coefficient of D^k from q_j (D + c)^j is C(j,k) c^{j-k}
        for k in range(j, -1, -1):
            out[k] = out[k] + q[j] * binom * power
            binom = binom * k // (j - k + 1) if k else binom
            power = power * c
    return out


def exact_particular(q, phi, ivar):
    """Exponential-polynomial particular of ``Q(D) y = phi`` in exact arithmetic.

    For each exponent ``c`` of ``phi``, ``Q(D + c) = D^m R(D)`` with
    ``R(0) != 0``, and ``y = e^{ct} D^{-m} [1/R(D)] g(t)`` where ``1/R`` is
    truncated as a power series at the degree of ``g``.
    """
    i = phi.ivars.index(ivar)
    groups = {}
    for (pw, ex), coeff in phi.terms.items():
        groups.setdefault(ex, []).append((pw, coeff))
    out = ExpPoly(phi.ivars)
    for ex, items in groups.items():
        c = ex[i]
        qs = _shift_coeffs(q, c)
        m = 0
        while m < len(qs) - 1 and not qs[m]:
            m += 1
        R = qs[m:]
        g = ExpPoly(phi.ivars, {(pw, tuple(ZERO for _ in ex)): co for pw, co in items})
        N = max(pw[i] for pw, _ in items)
        s = [ONE / R[0]]
        for k in range(1, N + 1):
            acc = ZERO
            for j in range(1, min(k, len(R) - 1) + 1):
                acc = acc + R[j] * s[k - j]
            s.append(-acc / R[0])
        y = ExpPoly(phi.ivars)
        deriv = g
        for k in range(N + 1):
            if s[k]:
                y = y + deriv.scale(s[k])
            deriv = deriv.diff(ivar)
        for _ in range(m):
            y = y.integrate(ivar, constant=False)
        out = out + y.shift(ivar, c)
    return out


def _drop_keys(f, keys):
    out = ExpPoly(f.ivars)
    for (pw, ex), c in f.terms.items():
        if any(pw == k[0] and all(_exp_close(a, b) for a, b in zip(ex, k[1])) for k in keys):
            continue
        out._accumulate(pw, ex, c)
    return out


def _phi(Pl, s, i):
    out = ExpPoly(s.ivars)
    for j, pj in enumerate(Pl):
        f = s.forcing[j]
        if pj is None or (isinstance(f, ExpPoly) and f.is_zero()):
            continue
        out = out + apply_operator(pj, f.with_ivars(s.ivars))
    return out


def solve_full(s, mode=FACTORIZATION, particular_only=False, assignment=None, pool=None):
    """Full (or particular) solution of a constant-coefficient ODE system."""
    if assignment:
        s = s.subs(assignment)
    kind = validate_system(s)
    if kind.is_vc:
        raise SymbolicCoefficientUnsupported("solving needs constant coefficients")
    if kind.is_pde:
        raise SymbolicCoefficientUnsupported("several independent variables: use solve_separable_pdae")
    if mode not in (FACTORIZATION, PARTIAL_FRACTIONS):
        raise ValueError(f"unknown mode {mode!r}")
    _require_numeric(s)
    _require_concrete(s)
    pool = pool or ConstPool("C")
    opvar = s.opvars()[0]
    ivar = s.ivars[0]
    inv = invert_operator_matrix(s)
    result = SolutionSet()
    result.inverse = inv
    for i, dv in enumerate(s.dvars):
        reduced = [_reduce_entry(inv.entries[i][j], opvar) for j in range(s.n)]
        Q = [ONE]
        for n_, d in reduced:
            if n_:
                Q = _lcm_lists(Q, d)
        Pl = []
        for n_, d in reduced:
            if not n_:
                Pl.append(None)
                continue
            cof, rem = _divmod(Q, d)
            if rem and max(abs(complex(x)) for x in rem) > 1e-9:
                raise SingularSystem("common denominator construction failed")
            Pl.append(OperatorPoly(_lists_to_poly(_mul_lists(n_, cof), opvar), (opvar,)))
        Qop = OperatorPoly(_lists_to_poly(Q, opvar), (opvar,))
        phi = _phi(Pl, s, i)
        roots = roots_of_operator(Qop)
        if mode == PARTIAL_FRACTIONS:
            x = _via_partial_fractions(Qop, roots, phi, ivar, ConstPool("k"))
        else:
            x = _chain(roots, phi, ivar, ConstPool("k"))
        x, consts, ckeys = absorb_constants(x, pool)
        if not roots.exact and _exact_list(Q) and phi.is_exact():
            hom = ExpPoly(x.ivars)
            for key in ckeys:
                hom._accumulate(key[0], key[1], x.terms[key])
            x = _drop_keys(exact_particular(Q, phi, ivar), ckeys) + hom
        part = x.drop_constants()
        if particular_only:
            x, consts = part, []
        result[dv] = x
        result.details[dv] = VariableSolution(dv, Qop, phi, roots, x, part, consts)
    return result


# -- separable PDE path -------------------------------------------------------------

@dataclass
class NotSeparable:
    """Result marker: ``poly`` is not a product of univariate operator factors."""

    poly: object
    reason: str = ""

    def __bool__(self):
        return False

    def __str__(self):
        return f"not separable: {self.poly} ({self.reason})"


def _random_value(rng):
    return GaussQ(Fraction(rng.randint(-97, 97), rng.randint(1, 13)))


def _poly_close(a, b, tol=1e-10):
    d = a - b
    if d.is_zero():
        return True
    if a.is_exact() and b.is_exact():
        return False
    scale = max([abs(complex(v)) for v in a.terms.values()] + [1.0])
    return all(abs(complex(v)) <= tol * scale for v in d.terms.values())


def factor_univariate_product(p, seed=SEPARABILITY_SEED, trials=SEPARABILITY_TRIALS):
    """Split ``p`` into univariate factors ``c * prod_k P_k(D_k)``, or NotSeparable."""
    p = p if isinstance(p, OperatorPoly) else OperatorPoly(p)
    if p.params():
        raise SymbolicCoefficientsRemain(
            f"operator depends on {sorted(map(str, p.params()))}; assign numeric values first")
    if p.rf.den:
        p = OperatorPoly(p.rf.num, p.opvars)
    num_ = p.rf.num
    used = [v for v in p.opvars if num_.degree_in(v) > 0]
    if len(used) <= 1:
        return [p]
    rng = random.Random(seed)
    factors = []
    for v in used:
        others = [w for w in used if w != v]
        cand = None
        for _ in range(trials):
            sub = num_.subs({w: _random_value(rng) for w in others})
            if sub.is_zero():
                return NotSeparable(p, f"vanishes at a random point in {', '.join(others)}")
            cs = _trim(sub.univariate_coeffs(v))
            lc = cs[-1]
            mon = [c / lc for c in cs]
            if cand is None:
                cand = mon
            elif len(mon) != len(cand) or any(
                    abs(complex(a) - complex(b)) > 1e-10 * max(1.0, abs(complex(b)))
                    for a, b in zip(mon, cand)):
                return NotSeparable(p, f"the factor in {op_ivar(v)} depends on the other operators")
        factors.append(_lists_to_poly(cand, v))
    prod = _prod(factors)
    lc_p = OperatorPoly(num_, p.opvars).leading_coeff()
    c = lc_p.num.const_value()
    if not _poly_close(num_, prod.scale(c)):
        return NotSeparable(p, "product of the trial factors does not reproduce the operator")
    factors[0] = factors[0].scale(c)
    return [OperatorPoly(f, (v,)) for f, v in zip(factors, used)]


def solve_separable_pdae(s, assignment=None, particular_only=False, pool=None):
    """Solve a constant-coefficient PDE system whose denominators separate.

    Integration constants are genuine constants (not arbitrary functions
    of the other independent variables).
    """
    if assignment:
        s = s.subs(assignment)
    kind = validate_system(s)
    if kind.is_vc:
        raise SymbolicCoefficientUnsupported("solving needs constant coefficients")
    _require_numeric(s)
    _require_concrete(s)
    pool = pool or ConstPool("C")
    inv = invert_operator_matrix(s)
    ov = s.opvars()
    result = SolutionSet()
    result.inverse = inv
    for i, dv in enumerate(s.dvars):
        row = inv.entries[i]
        dens = []
        for h in row:
            if not h.is_zero():
                dens, _, _ = _factor_lcm(dens, h.den)
        Q = _prod(dens)
        Pl = []
        for h in row:
            if h.is_zero():
                Pl.append(None)
                continue
            cof = Q.divexact(h.den_poly())
            if cof is None:
                return NotSeparable(Q, "denominators do not share a common multiple")
            Pl.append(OperatorPoly(h.num * cof, ov))
        phi = _phi(Pl, s, i)
        parts = factor_univariate_product(OperatorPoly(Q, ov))
        if not parts:
            return parts
        x = phi
        kpool = ConstPool("k")
        roots_all = []
        for f in parts:
            if f.degree() == 0:
                c = f.rf.num.const_value() if not f.rf.num.is_zero() else ONE
                x = x.scale(ONE / c if is_exact(c) else 1 / complex(c))
                continue
            v = next(w for w in f.opvars if f.rf.num.degree_in(w) > 0)
            rs = roots_of_operator(OperatorPoly(f.rf, (v,)))
            roots_all.append((op_ivar(v), rs))
            x = _chain(rs, x.with_ivars(s.ivars), op_ivar(v), kpool)
        x, consts, _ = absorb_constants(x, pool)
        part = x.drop_constants()
        if particular_only:
            x, consts = part, []
        result[dv] = x
        result.details[dv] = VariableSolution(dv, OperatorPoly(Q, ov), phi, roots_all, x, part,
                                              consts)
    return result


def solve(s, mode=FACTORIZATION, particular_only=False, assignment=None):
    """Dispatch on the number of independent variables."""
    if len(s.ivars) > 1:
        return solve_separable_pdae(s, assignment, particular_only)
    return solve_full(s, mode, particular_only, assignment)


__all__ = [
    "OperatorInverse",
    "invert_operator_matrix",
    "PartialFractionDecomposition",
    "partial_fractions",
    "solve_full",
    "solve",
    "SolutionSet",
    "VariableSolution",
    "factor_univariate_product",
    "NotSeparable",
    "solve_separable_pdae",
    "exact_particular",
    "absorb_constants",
]
