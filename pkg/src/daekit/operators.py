"""Differential-operator polynomials and their action on exponential polynomials.

An operator symbol is the string ``"D_" + ivar`` and differentiates with
respect to ``ivar``.  :class:`OperatorPoly` is a commutative polynomial in
such symbols whose coefficients are rational functions of parameters only.
:class:`VcOperator` allows coefficient *functions* of the independent
variable, represented formally through :class:`FuncSymbol`.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .errors import NonConstantLeftFactor, SymbolicCoefficientUnsupported
from .expfunc import ExpPoly
from .scalar import GaussQ, Poly, RatFunc, num, sym_str


def op_symbol(ivar):
    return f"D_{ivar}"


def op_ivar(sym):
    if not (isinstance(sym, str) and sym.startswith("D_")):
        raise ValueError(f"not an operator symbol: {sym!r}")
    return sym[2:]


def is_op_symbol(s):
    return isinstance(s, str) and s.startswith("D_")


@dataclass(frozen=True)
class FuncSymbol:
    """Opaque coefficient function ``name^{(order)}(args)``.

    ``order`` counts derivatives with respect to ``args[0]``; the remaining
    arguments (e.g. a frequency) are carried along for display only.
    """

    name: str
    order: int = 0
    args: tuple = ("t",)

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("derivative order must be nonnegative")
        object.__setattr__(self, "args", tuple(self.args))

    @property
    def sort_key(self):
        return (1, self.name, self.order, self.args)

    @property
    def ivar(self):
        return self.args[0]

    def derivative(self):
        return FuncSymbol(self.name, self.order + 1, self.args)

    def __str__(self):
        return f"{self.name}{chr(39) * self.order}({','.join(self.args)})"


def _poly_partial(p, s):
    out = {}
    for m, c in p.terms.items():
        d = dict(m)
        e = d.get(s, 0)
        if not e:
            continue
        if e == 1:
            del d[s]
        else:
            d[s] = e - 1
        key = tuple(sorted(d.items(), key=lambda it: (0, it[0]) if isinstance(it[0], str)
                           else it[0].sort_key))
        out[key] = out.get(key, 0) + c * e
    return Poly(out)


def func_diff(expr, ivar):
    """Formal derivative of a coefficient expression in parameters and FuncSymbols."""
    expr = RatFunc.coerce(expr)
    if any(isinstance(s, FuncSymbol) for f in expr.den for s in f.symbols()):
        raise SymbolicCoefficientUnsupported("coefficient functions in a denominator")
    total = Poly()
    for s in expr.num.symbols():
        if isinstance(s, FuncSymbol) and s.ivar == ivar:
            total = total + _poly_partial(expr.num, s) * Poly.symbol(s.derivative())
    return RatFunc(total, expr.den)


class OperatorPoly:
    """Polynomial in commuting operator symbols with parameter coefficients."""

    __slots__ = ("rf", "opvars")

    def __init__(self, value=0, opvars=None):
        rf = RatFunc.coerce(value.rf if isinstance(value, OperatorPoly) else value)
        found = {s for s in rf.num.symbols() if is_op_symbol(s)}
        for f in rf.den:
            if any(is_op_symbol(s) for s in f.symbols()):
                raise ValueError("operator symbol in a denominator")
            if any(isinstance(s, FuncSymbol) for s in f.symbols()):
                raise ValueError("coefficient function in an OperatorPoly")
        if any(isinstance(s, FuncSymbol) for s in rf.num.symbols()):
            raise ValueError("coefficient function in an OperatorPoly; use VcOperator")
        declared = tuple(opvars) if opvars is not None else ()
        if isinstance(value, OperatorPoly):
            declared = tuple(dict.fromkeys(value.opvars + declared))
        self.rf = rf
        self.opvars = tuple(sorted(set(declared) | found))

    @classmethod
    def D(cls, ivar="t", power=1):
        s = op_symbol(ivar)
        return cls(Poly.symbol(s, power), (s,))

    @classmethod
    def from_coeffs(cls, coeffs, ivar="t"):
        """Univariate operator from ascending coefficients."""
        s = op_symbol(ivar)
        p = RatFunc.coerce(0)
        for k, c in enumerate(coeffs):
            p = p + RatFunc.coerce(c) * Poly.symbol(s, k)
        return cls(p, (s,))

    # -- structure -----------------------------------------------------------
    def terms(self):
        """``{operator monomial: RatFunc coefficient}``."""
        split = self.rf.num.coeffs_in(set(self.opvars))
        return {m: RatFunc(c, self.rf.den) for m, c in split.items()}

    def is_zero(self):
        return self.rf.is_zero()

    def __bool__(self):
        return not self.rf.is_zero()

    def degree(self, opvar=None):
        if opvar is None:
            return self.rf.num.degree(set(self.opvars))
        return self.rf.num.degree_in(opvar)

    def params(self):
        return {s for s in self.rf.symbols() if not is_op_symbol(s)}

    def is_numeric(self):
        return not self.params()

    def is_exact(self):
        return self.rf.is_exact()

    def ivars(self):
        return tuple(op_ivar(s) for s in self.opvars)

    def leading_coeff(self):
        """Coefficient of the graded-lex leading operator monomial."""
        ts = self.terms()
        key = Poly()._order_key(set(self.opvars))
        m = max(ts, key=key)
        return ts[m]

    def univariate_coeffs(self, opvar=None):
        """Ascending RatFunc coefficients in a single operator symbol."""
        if opvar is None:
            if len(self.opvars) > 1:
                raise ValueError("operator is multivariate")
            opvar = self.opvars[0] if self.opvars else "D_t"
        others = set(self.opvars) - {opvar}
        if others and any(self.rf.num.degree_in(o) > 0 for o in others):
            raise ValueError("operator involves other operator symbols")
        n = max(self.degree(opvar), 0)
        out = [RatFunc.coerce(0) for _ in range(n + 1)]
        for m, c in self.terms().items():
            out[dict(m).get(opvar, 0)] = c
        return out

    # -- arithmetic ----------------------------------------------------------
    def _wrap(self, rf, other=None):
        ov = self.opvars if other is None else tuple(set(self.opvars) | set(other.opvars))
        return OperatorPoly(rf, ov)

    def __add__(self, other):
        other = _as_op(other)
        return self._wrap(self.rf + other.rf, other)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_op(other)
        return self._wrap(self.rf - other.rf, other)

    def __rsub__(self, other):
        return _as_op(other) - self

    def __neg__(self):
        return self._wrap(-self.rf)

    def __mul__(self, other):
        if isinstance(other, VcOperator):
            return NotImplemented
        other = _as_op(other)
        return self._wrap(self.rf * other.rf, other)

    __rmul__ = __mul__

    def __truediv__(self, c):
        c = RatFunc.coerce(c)
        if any(is_op_symbol(s) for s in c.symbols()):
            raise ValueError("cannot divide by an operator")
        return self._wrap(self.rf / c)

    def __pow__(self, k):
        return self._wrap(self.rf ** k)

    def __eq__(self, other):
        if isinstance(other, VcOperator):
            return other == self
        try:
            other = _as_op(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.rf == other.rf

    __hash__ = None

    def subs(self, mapping):
        return self._wrap(self.rf.subs(mapping))

    def evaluate_at(self, point):
        """Exact substitution of operator symbols by values: ``P(a)``."""
        return self.rf.subs({op_symbol(v) if not is_op_symbol(v) else v: num(a)
                             for v, a in point.items()})

    def __str__(self):
        return format_operator(self)

    def __repr__(self):
        return f"OperatorPoly({str(self)!r})"


def _as_op(x):
    if isinstance(x, OperatorPoly):
        return x
    if isinstance(x, VcOperator):
        raise TypeError("expected a constant-coefficient operator")
    return OperatorPoly(x)


def format_operator(p, sym=sym_str):
    ts = p.terms()
    if not ts:
        return "0"
    key = Poly()._order_key(set(p.opvars))
    parts = []
    for m in sorted(ts, key=key, reverse=True):
        c = ts[m]
        ops = "*".join(sym(s) if e == 1 else f"{sym(s)}^{e}" for s, e in m)
        cs = str(c)
        neg = False
        if cs.startswith("-") and len(c.num.terms) == 1:
            neg, cs = True, str(-c)
        if ops:
            if cs == "1":
                body = ops
            elif len(c.num.terms) > 1 and not c.den:
                body = f"({cs})*{ops}"
            else:
                body = f"{cs}*{ops}"
        else:
            body = cs
        parts.append(("-" if neg else "+", body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


class VcOperator:
    """``sum_k a_k(t) D_t^k`` with formal coefficient functions."""

    __slots__ = ("ivar", "coeffs")

    def __init__(self, coeffs=None, ivar="t"):
        self.ivar = ivar
        self.coeffs = {}
        for k, c in (coeffs or {}).items():
            c = RatFunc.coerce(c)
            if any(is_op_symbol(s) for s in c.symbols()):
                raise ValueError("operator symbol inside a coefficient")
            if not c.is_zero():
                self.coeffs[int(k)] = c

    @property
    def opvar(self):
        return op_symbol(self.ivar)

    @classmethod
    def from_operator(cls, p, ivar=None):
        if isinstance(p, VcOperator):
            return p
        p = _as_op(p)
        if ivar is None:
            ivar = p.ivars()[0] if p.opvars else "t"
        if set(p.opvars) - {op_symbol(ivar)}:
            raise ValueError("operator is not univariate in the vc variable")
        cs = p.univariate_coeffs(op_symbol(ivar))
        return cls({k: c for k, c in enumerate(cs)}, ivar)

    def terms(self):
        """Sorted list of (coefficient, order) pairs, highest order first."""
        return [(self.coeffs[k], k) for k in sorted(self.coeffs, reverse=True)]

    def is_zero(self):
        return not self.coeffs

    def degree(self):
        return max(self.coeffs) if self.coeffs else -1

    def func_symbols(self):
        return {s for c in self.coeffs.values() for s in c.symbols() if isinstance(s, FuncSymbol)}

    def is_constant(self):
        return not self.func_symbols()

    def to_operator(self):
        if not self.is_constant():
            raise NonConstantLeftFactor("operator has variable coefficients")
        s = self.opvar
        rf = RatFunc.coerce(0)
        for k, c in self.coeffs.items():
            rf = rf + c * Poly.symbol(s, k)
        return OperatorPoly(rf, (s,))

    def __add__(self, other):
        other = _as_vc(other, self.ivar)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out[k] + c if k in out else c
        return VcOperator(out, self.ivar)

    __radd__ = __add__

    def __neg__(self):
        return VcOperator({k: -c for k, c in self.coeffs.items()}, self.ivar)

    def __sub__(self, other):
        return self + (-_as_vc(other, self.ivar))

    def __rsub__(self, other):
        return _as_vc(other, self.ivar) - self

    def scale(self, c):
        c = RatFunc.coerce(c)
        return VcOperator({k: v * c for k, v in self.coeffs.items()}, self.ivar)

    def __truediv__(self, c):
        return self.scale(RatFunc.coerce(1) / RatFunc.coerce(c))

    def __mul__(self, other):
        if isinstance(other, VcOperator):
            return multiply_vc(self, other)
        if isinstance(other, OperatorPoly):
            return multiply_vc(self, VcOperator.from_operator(other, self.ivar))
        return self.scale(other)

    def __rmul__(self, other):
        if isinstance(other, OperatorPoly):
            return compose_vc(other, self)
        return self.scale(other)

    def __eq__(self, other):
        try:
            other = _as_vc(other, self.ivar)
        except (TypeError, ValueError):
            return NotImplemented
        keys = set(self.coeffs) | set(other.coeffs)
        zero = RatFunc.coerce(0)
        return all(self.coeffs.get(k, zero) == other.coeffs.get(k, zero) for k in keys)

    __hash__ = None

    def subs(self, mapping):
        return VcOperator({k: c.subs(mapping) for k, c in self.coeffs.items()}, self.ivar)

    def __str__(self):
        return format_vc(self)

    def __repr__(self):
        return f"VcOperator({str(self)!r})"


def _as_vc(x, ivar):
    if isinstance(x, VcOperator):
        return x
    if isinstance(x, OperatorPoly):
        return VcOperator.from_operator(x, ivar)
    return VcOperator({0: x}, ivar)


def format_vc(h, sym=sym_str):
    if h.is_zero():
        return "0"
    parts = []
    d = sym(h.opvar)
    for c, k in h.terms():
        cs = str(c)
        neg = False
        if cs.startswith("-") and len(c.num.terms) == 1:
            neg, cs = True, str(-c)
        ops = "" if k == 0 else (d if k == 1 else f"{d}^{k}")
        if ops:
            if cs == "1":
                body = ops
            elif len(c.num.terms) > 1 and not c.den:
                body = f"({cs})*{ops}"
            else:
                body = f"{cs}*{ops}"
        else:
            body = cs
        parts.append(("-" if neg else "+", body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def op_arith(a, b, op):
    a, b = _as_op(a), _as_op(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def exp_shift(p, a):
    """``P(D + a)``: substitute each ``D_i -> D_i + a_i`` and expand.

    ``a`` is a scalar (univariate ``p``) or a mapping from ivar/operator
    symbol to shift.
    """
    p = _as_op(p)
    if not isinstance(a, dict):
        if len(p.opvars) > 1:
            raise ValueError("multivariate operator needs an exponent per variable")
        a = {p.opvars[0] if p.opvars else "D_t": a}
    mapping = {}
    for k, v in a.items():
        s = k if is_op_symbol(k) else op_symbol(k)
        mapping[s] = Poly.symbol(s) + Poly.coerce(num(v) if not isinstance(v, (Poly, str)) else v)
    return OperatorPoly(p.rf.subs(mapping), p.opvars)


def apply_operator(p, f):
    """Exact action of a constant-coefficient operator on an ExpPoly."""
    if isinstance(p, VcOperator):
        if not p.is_constant():
            raise SymbolicCoefficientUnsupported("cannot apply a variable-coefficient operator")
        p = p.to_operator()
    p = _as_op(p)
    if p.rf.den:
        raise SymbolicCoefficientUnsupported(
            f"coefficients of {p} have parameter denominators; assign parameter values first")
    ivars = tuple(dict.fromkeys(f.ivars + p.ivars()))
    f = f.with_ivars(ivars)
    cache = {(): f}

    def deriv(mono):
        if mono in cache:
            return cache[mono]
        s, e = mono[-1]
        prev = mono[:-1] + (((s, e - 1),) if e > 1 else ())
        g = deriv(prev).diff(op_ivar(s))
        cache[mono] = g
        return g

    out = ExpPoly(ivars)
    for m, c in p.rf.num.coeffs_in(set(p.opvars)).items():
        out = out + deriv(m).scale(c)
    return out


def compose_vc(p, h):
    """``p o h`` expanded with ``D^k o a = sum_j C(k,j) a^(j) D^(k-j)``.

    ``p`` must have constant (parameter-only) coefficients.
    """
    if isinstance(p, VcOperator) and not p.is_constant():
        raise NonConstantLeftFactor(f"left factor {p} has variable coefficients")
    return multiply_vc(p, h)


def multiply_vc(p, h):
    """General product ``p o h``; coefficients of ``p`` may be functions too."""
    if isinstance(p, VcOperator):
        pc = dict(p.coeffs)
        ivar = p.ivar
    else:
        p = _as_op(p)
        ivar = h.ivar if isinstance(h, VcOperator) else (p.ivars() or ("t",))[0]
        if set(p.opvars) - {op_symbol(ivar)}:
            raise NonConstantLeftFactor("left factor involves another operator symbol")
        pc = dict(enumerate(p.univariate_coeffs(op_symbol(ivar))))
    h = _as_vc(h, ivar)
    out = {}
    for k, pk in pc.items():
        if pk.is_zero():
            continue
        for m, a in h.coeffs.items():
            deriv = a
            for j in range(k + 1):
                if j:
                    deriv = func_diff(deriv, ivar)
                    if deriv.is_zero():
                        break
                order = k - j + m
                term = pk * deriv * GaussQ(comb(k, j))
                out[order] = out[order] + term if order in out else term
    return VcOperator(out, ivar)
