"""Governing equation ``P(D) x_n = sum_i Q_i(D) f_i`` for one chosen variable.

Three routes:

* :func:`eliminate_governing` -- Gaussian elimination over the fraction
  field of the (commutative) operator ring, followed by clearing the
  denominators of the final row;
* :func:`governing_via_determinant` -- ``P = det M`` with cofactor
  right-hand sides;
* :func:`vc_governing` -- the same elimination when every
  variable-coefficient entry sits in the target column, so that all row
  multipliers stay constant-coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    SingularSystem,
    StructurallySingular,
    VcConditionViolated,
    VcUnsupportedHere,
)
from .expfunc import ExpPoly
from .operators import OperatorPoly, VcOperator, compose_vc, is_op_symbol
from .scalar import RatFunc, _split_factor
from .system import as_operator, determinant, entry_is_vc, reorder_target_last, validate_system


@dataclass
class GoverningEquation:
    target: str
    lhs: object
    rhs: list
    trace: list = field(default_factory=list)
    ivars: tuple = ("t",)
    method: str = "elimination"

    def phi(self):
        """Right-hand side as ``[(Q_i, f_i)]`` with forcing objects resolved."""
        return [(q, f) for _, q, f in self.rhs]

    def rhs_operator(self, i):
        for j, q, _ in self.rhs:
            if j == i:
                return q
        return OperatorPoly(0)


def _op_degree(rf, opvars):
    d = rf.num.degree(opvars)
    for f in rf.den:
        d -= f.degree(opvars)
    return d


def _is_numeric_coeff(rf):
    return rf.is_const()


def _augmented(s, matrix_rf):
    n = s.n
    one, zero = RatFunc.coerce(1), RatFunc.coerce(0)
    return [list(matrix_rf[i]) + [one if j == i else zero for j in range(n)] for i in range(n)]


def _forward_eliminate(A, ncols, opvars, trace):
    """In-place elimination of columns ``0..ncols-1``; returns (pivots, sign)."""
    n = len(A)
    pivots, sign = [], 1
    for k in range(ncols):
        cands = [r for r in range(k, n) if not A[r][k].is_zero()]
        if not cands:
            raise StructurallySingular(
                f"column {k + 1} has no nonzero entry in the remaining rows")
        best = min(cands, key=lambda r: (_op_degree(A[r][k], opvars), r))
        if best != k:
            A[k], A[best] = A[best], A[k]
            sign = -sign
            trace.append({"op": "swap", "rows": [k + 1, best + 1]})
        piv = A[k][k]
        pivots.append(piv)
        trace.append({"op": "pivot", "row": k + 1, "column": k + 1, "value": str(piv)})
        for r in range(k + 1, n):
            if A[r][k].is_zero():
                continue
            m = A[r][k] / piv
            trace.append({"op": "eliminate", "row": r + 1, "pivot_row": k + 1,
                          "multiplier": str(m)})
            A[r][k] = RatFunc.coerce(0)
            for j in range(k + 1, len(A[r])):
                if not A[k][j].is_zero():
                    A[r][j] = A[r][j] - m * A[k][j]
    return pivots, sign


def _clearing_factor(pivots, sign):
    factor = RatFunc.coerce(sign)
    for p in pivots:
        factor = factor * p
    return factor


def _op_factors(rf, opvars):
    """Distinct operator-involving factors of a rational function's numerator."""
    out = []
    _, fs = _split_factor(rf.num)
    for f in fs:
        if f.degree(opvars) > 0 and f not in out:
            out.append(f)
    return out


def _cancel_common(lhs, rhs, candidates, opvars, trace):
    changed = True
    while changed:
        changed = False
        for f in candidates:
            ql = lhs.num.divexact(f)
            if ql is None:
                continue
            qr = [q.num.divexact(f) for q in rhs]
            if any(q is None for q in qr):
                continue
            lhs = RatFunc._raw(ql, lhs.den)
            rhs = [RatFunc._raw(q, r.den) for q, r in zip(qr, rhs)]
            trace.append({"op": "cancel", "factor": str(f)})
            changed = True
    return lhs, rhs


def _nonzero_forcing(f):
    return not (isinstance(f, ExpPoly) and f.is_zero())


def _params_free(ops):
    return all(not (o.rf.symbols() - {s for s in o.rf.symbols() if is_op_symbol(s)})
               for o in ops)


def _normalize(lhs, rhs, monic, trace):
    """Divide everything by the leading lhs coefficient when requested or numeric."""
    if isinstance(lhs, VcOperator):
        lc = lhs.terms()[0][0]
        numeric_all = lc.is_const()
    else:
        lc = lhs.leading_coeff()
        numeric_all = _params_free([lhs] + [q for _, q, _ in rhs])
    if not (monic or numeric_all):
        return lhs, rhs
    if lc == 1:
        return lhs, rhs
    trace.append({"op": "normalize", "divisor": str(lc)})
    inv = RatFunc.coerce(1) / lc
    if isinstance(lhs, VcOperator):
        lhs = lhs.scale(inv)
    else:
        lhs = OperatorPoly(lhs.rf * inv, lhs.opvars)
    rhs = [(j, OperatorPoly(q.rf * inv, q.opvars), f) for j, q, f in rhs]
    return lhs, rhs


def eliminate_governing(s, target, monic=False, reduce=False):
    """Governing equation for ``target`` by fraction-field Gaussian elimination.

    Clearing by the product of pivots makes the operator equal to det M.
    With ``reduce`` a pivot factor that divides the operator and every
    forcing cofactor is cancelled, giving a lower-order equation.
    """
    kind = validate_system(s)
    if kind.is_vc:
        raise VcUnsupportedHere("variable-coefficient system: use vc_governing")
    s2 = reorder_target_last(s, target)
    n = s2.n
    opvars = set(s2.opvars())
    A = _augmented(s2, [[as_operator(e).rf for e in row] for row in s2.matrix])
    trace = [{"op": "order", "dvars": list(s2.dvars)}]
    pivots, sign = _forward_eliminate(A, n - 1, opvars, trace)
    h = A[n - 1][n - 1]
    if h.is_zero():
        raise SingularSystem("final pivot vanishes: det M(D) is identically zero")
    g = A[n - 1][n:]
    factor = _clearing_factor(pivots, sign)
    trace.append({"op": "clear", "factor": str(factor)})
    lhs = h * factor
    gs = [gi * factor for gi in g]
    cands = []
    for p in pivots:
        cands.extend(f for f in _op_factors(p, opvars) if f not in cands)
    idx = [j for j in range(n) if _nonzero_forcing(s2.forcing[j]) and not gs[j].is_zero()]
    kept = [gs[j] for j in idx]
    if reduce:
        lhs, kept = _cancel_common(lhs, kept, cands, opvars, trace)
    ov = s2.opvars()
    rhs = [(j, OperatorPoly(q, ov), s2.forcing[j]) for j, q in zip(idx, kept)]
    lhs_op = OperatorPoly(lhs, ov)
    lhs_op, rhs = _normalize(lhs_op, rhs, monic, trace)
    return GoverningEquation(target, lhs_op, rhs, trace, s.ivars, "elimination")


def governing_via_determinant(s, target, monic=False):
    """``P = det M``; ``Q_i`` is the signed cofactor of entry (i, target)."""
    kind = validate_system(s)
    if kind.is_vc:
        raise VcUnsupportedHere("variable-coefficient system: use vc_governing")
    t = s.index(target)
    rows = [[as_operator(e).rf for e in row] for row in s.matrix]
    det = determinant(rows)
    if det.is_zero():
        raise SingularSystem("det M(D) vanishes identically")
    ov = s.opvars()
    rhs = []
    for i in range(s.n):
        if not _nonzero_forcing(s.forcing[i]):
            continue
        minor = [[rows[r][c] for c in range(s.n) if c != t] for r in range(s.n) if r != i]
        cof = determinant(minor)
        if (i + t) % 2:
            cof = -cof
        if not cof.is_zero():
            rhs.append((i, OperatorPoly(cof, ov), s.forcing[i]))
    trace = [{"op": "determinant"}]
    lhs, rhs = _normalize(OperatorPoly(det, ov), rhs, monic, trace)
    return GoverningEquation(target, lhs, rhs, trace, s.ivars, "determinant")


def vc_governing(s, target, monic=False):
    """Governing equation when all variable coefficients act on ``target``."""
    validate_system(s)
    s2 = reorder_target_last(s, target)
    n = s2.n
    bad = [(i, j) for i, row in enumerate(s2.matrix) for j, e in enumerate(row)
           if j < n - 1 and entry_is_vc(e)]
    if bad:
        names = ", ".join(f"row {i + 1} / {s2.dvars[j]}" for i, j in bad)
        raise VcConditionViolated(
            f"last-column condition is not met for target {target!r}: "
            f"variable coefficients also act on other variables ({names})")
    last = [VcOperator.from_operator(row[n - 1], _vc_ivar(s2))
            if not isinstance(row[n - 1], VcOperator) else row[n - 1]
            for row in s2.matrix]
    ivar = _vc_ivar(s2)
    opvars = set(s2.opvars())
    core = [[as_operator(e).rf for e in row[:n - 1]] for row in s2.matrix]
    # column n-1 is a placeholder; the identity block tracks how rows combine
    A = [core[i] + [RatFunc.coerce(0)] + [RatFunc.coerce(1 if j == i else 0) for j in range(n)]
         for i in range(n)]
    trace = [{"op": "order", "dvars": list(s2.dvars)}]
    pivots, sign = _forward_eliminate(A, n - 1, opvars, trace)
    factor = _clearing_factor(pivots, sign)
    trace.append({"op": "clear", "factor": str(factor)})
    g = [A[n - 1][n + j] * factor for j in range(n)]
    ov = s2.opvars()
    lhs = VcOperator({}, ivar)
    for j in range(n):
        if g[j].is_zero() or last[j].is_zero():
            continue
        if any(is_op_symbol(x) for f in g[j].den for x in f.symbols()):
            raise SingularSystem("denominator clearing left an operator denominator")
        lhs = lhs + compose_vc(OperatorPoly(g[j], ov), last[j])
    if lhs.is_zero():
        raise SingularSystem("governing operator vanishes")
    rhs = [(j, OperatorPoly(g[j], ov), s2.forcing[j]) for j in range(n)
           if _nonzero_forcing(s2.forcing[j]) and not g[j].is_zero()]
    lhs, rhs = _normalize(lhs, rhs, monic, trace)
    return GoverningEquation(target, lhs, rhs, trace, s.ivars, "vc-elimination")


def _vc_ivar(s):
    for row in s.matrix:
        for e in row:
            if isinstance(e, VcOperator) and not e.is_constant():
                return e.ivar
    return s.ivars[0]


def govern(s, target, monic=False, reduce=False):
    """Dispatch to the elimination route appropriate for the system class."""
    kind = validate_system(s)
    if kind.is_vc:
        return vc_governing(s, target, monic)
    return eliminate_governing(s, target, monic, reduce)


__all__ = [
    "GoverningEquation",
    "eliminate_governing",
    "governing_via_determinant",
    "vc_governing",
    "govern",
]
