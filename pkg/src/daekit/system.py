"""Operator-matrix formulation ``M(D) x = f`` of a linear DAE system."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import NonSquare, SingularSystem, UndeclaredOperator, UnknownVariable
from .expfunc import ExpPoly
from .operators import OperatorPoly, VcOperator, is_op_symbol, op_symbol
from .scalar import RatFunc


@dataclass(frozen=True)
class ForcingSymbol:
    """Opaque named forcing term such as ``f1(t)``."""

    name: str
    args: tuple = ("t",)

    def __str__(self):
        return f"{self.name}({','.join(self.args)})"


@dataclass(frozen=True)
class SystemKind:
    tag: str
    vc_columns: frozenset = frozenset()

    @property
    def is_vc(self):
        return self.tag.startswith("vc")

    @property
    def is_pde(self):
        return self.tag.endswith("PDAE")


@dataclass(frozen=True, eq=False)
class DaeSystem:
    """Square operator matrix with named variables and a forcing vector.

    ``matrix`` entries are :class:`OperatorPoly` or :class:`VcOperator`;
    ``forcing`` entries are :class:`ExpPoly` or :class:`ForcingSymbol`.
    ``opaque`` lists parameters that stand for generic operator
    polynomials (rendered as ``P_{ij}(D)``).  ``row_notes`` records
    row pre-multiplications applied at construction (``int`` rows).
    """

    ivars: tuple
    dvars: tuple
    matrix: tuple
    forcing: tuple
    params: tuple = ()
    opaque: tuple = ()
    row_notes: tuple = field(default=())
    funcs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "ivars", tuple(self.ivars))
        object.__setattr__(self, "dvars", tuple(self.dvars))
        object.__setattr__(self, "matrix", tuple(tuple(r) for r in self.matrix))
        object.__setattr__(self, "forcing", tuple(self.forcing))
        object.__setattr__(self, "params", tuple(self.params))
        object.__setattr__(self, "opaque", tuple(self.opaque))
        object.__setattr__(self, "row_notes", tuple(self.row_notes))
        object.__setattr__(self, "funcs", tuple(self.funcs))

    @property
    def n(self):
        return len(self.dvars)

    def entry(self, i, j):
        return self.matrix[i][j]

    def column(self, j):
        return [row[j] for row in self.matrix]

    def index(self, dvar):
        try:
            return self.dvars.index(dvar)
        except ValueError:
            raise UnknownVariable(f"unknown dependent variable {dvar!r}") from None

    def opvars(self):
        return tuple(op_symbol(v) for v in self.ivars)

    def is_homogeneous(self):
        return all(isinstance(f, ExpPoly) and f.is_zero() for f in self.forcing)

    def has_concrete_forcing(self):
        return all(isinstance(f, ExpPoly) for f in self.forcing)

    def subs(self, mapping):
        """Substitute parameter values everywhere (matrix and forcing)."""
        mat = [[e.subs(mapping) for e in row] for row in self.matrix]
        forcing = [f.subs(mapping) if isinstance(f, ExpPoly) else f for f in self.forcing]
        params = [p for p in self.params if p not in mapping]
        return replace(self, matrix=mat, forcing=forcing, params=params)

    def with_forcing(self, forcing):
        return replace(self, forcing=tuple(forcing))

    def __eq__(self, other):
        if not isinstance(other, DaeSystem):
            return NotImplemented
        if (self.ivars, self.dvars) != (other.ivars, other.dvars):
            return False
        for ra, rb in zip(self.matrix, other.matrix):
            for a, b in zip(ra, rb):
                if not (a == b):
                    return False
        for a, b in zip(self.forcing, other.forcing):
            if isinstance(a, ExpPoly) != isinstance(b, ExpPoly) or not (a == b):
                return False
        return True

    __hash__ = None


def entry_is_vc(e):
    return isinstance(e, VcOperator) and not e.is_constant()


def as_operator(e):
    """Constant-coefficient view of an entry."""
    if isinstance(e, VcOperator):
        return e.to_operator()
    return e


def determinant(rows):
    """Cofactor expansion of a square matrix of RatFunc (memoized on column sets)."""
    n = len(rows)
    if n == 0:
        return RatFunc.coerce(1)
    memo = {}

    def minor(r, cols):
        if r == n:
            return RatFunc.coerce(1)
        key = (r, cols)
        if key in memo:
            return memo[key]
        total = RatFunc.coerce(0)
        sign = 1
        for c in cols:
            a = rows[r][c]
            if not a.is_zero():
                sub = minor(r + 1, tuple(x for x in cols if x != c))
                if not sub.is_zero():
                    term = a * sub
                    total = total + term if sign > 0 else total - term
            sign = -sign
        memo[key] = total
        return total

    return minor(0, tuple(range(n)))


def operator_det(s):
    rows = [[as_operator(e).rf for e in row] for row in s.matrix]
    return OperatorPoly(determinant(rows), s.opvars())


def validate_system(s):
    """Classify the system; reject non-square and (for cc systems) singular ones."""
    n = len(s.dvars)
    if len(s.matrix) != n or any(len(r) != n for r in s.matrix) or len(s.forcing) != n:
        raise NonSquare(f"expected a {n}x{n} operator matrix with {n} forcing entries")
    declared = set(s.opvars())
    vc_cols = set()
    for i, row in enumerate(s.matrix):
        if all(e.is_zero() for e in row):
            raise SingularSystem(f"row {i + 1} has no nonzero entry")
        for j, e in enumerate(row):
            used = {e.opvar} if isinstance(e, VcOperator) and not e.is_zero() else (
                set(e.opvars) & {x for x in e.rf.symbols() if is_op_symbol(x)}
                if isinstance(e, OperatorPoly) else set())
            if used - declared:
                raise UndeclaredOperator(
                    f"entry ({i + 1},{j + 1}) uses undeclared operator {sorted(used - declared)}")
            if entry_is_vc(e):
                vc_cols.add(j)
    prefix = "vc" if vc_cols else "cc"
    suffix = "PDAE" if len(s.ivars) > 1 else "ODAE"
    kind = SystemKind(f"{prefix}-{suffix}", frozenset(vc_cols))
    if not vc_cols and operator_det(s).is_zero():
        raise SingularSystem("det M(D) vanishes identically")
    return kind


def reorder_target_last(s, target):
    """Permute columns so that ``target`` is the final dependent variable."""
    k = s.index(target)
    if k == s.n - 1:
        return s
    order = [j for j in range(s.n) if j != k] + [k]
    mat = [[row[j] for j in order] for row in s.matrix]
    return replace(s, dvars=[s.dvars[j] for j in order], matrix=mat)
