"""Exponential polynomials: finite sums of ``c * t^k * exp(a*t)``.

The class is closed under differentiation, integration and multiplication
by exponentials, which makes it the working function space of the solver.
Several independent variables are allowed; each term then carries one
power and one exponent per variable.

Coefficients are :class:`~daekit.scalar.Poly` values so that integration
constants (:class:`ConstSymbol`) and forcing amplitudes left as parameters
can ride along linearly.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field

import numpy as np

from .errors import UnboundConstant, UnboundSymbol
from .scalar import ONE, ZERO, GaussQ, Poly, format_scalar, is_exact, num

EXP_MERGE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ConstSymbol:
    """Integration constant.  Identity is the name; provenance is a note."""

    name: str
    index: int = 0
    provenance: str = field(default="", compare=False)

    @property
    def sort_key(self):
        return (2, self.name[:1], self.index, self.name)

    def __eq__(self, other):
        return isinstance(other, ConstSymbol) and other.name == self.name

    def __hash__(self):
        return hash(("const", self.name))

    def __str__(self):
        return self.name


class ConstPool:
    """Session-scoped generator of fresh, never colliding constants."""

    def __init__(self, prefix="c"):
        self.prefix = prefix
        self._counter = itertools.count(1)
        self._lock = threading.Lock()
        self.created = []

    def fresh(self, provenance=""):
        with self._lock:
            k = next(self._counter)
            c = ConstSymbol(f"{self.prefix}_{k}", k, provenance)
            self.created.append(c)
        return c


_default_pool = ConstPool()


def _is_zero_exp(a):
    if is_exact(a):
        return not a
    return abs(a) < EXP_MERGE_TOL


def _snap_exp(a):
    if is_exact(a):
        return a
    a = complex(a)
    return ZERO if abs(a) < EXP_MERGE_TOL else a


def _exp_close(a, b):
    if is_exact(a) and is_exact(b):
        return a == b
    return abs(complex(a) - complex(b)) <= EXP_MERGE_TOL


class ExpPoly:
    """Sum of ``coeff * prod_v t_v^{k_v} * exp(sum_v a_v t_v)`` terms.

    ``terms`` maps ``(powers, exponents)`` (tuples aligned with ``ivars``)
    to a nonzero coefficient :class:`Poly`.
    """

    __slots__ = ("ivars", "terms")

    def __init__(self, ivars, terms=None):
        self.ivars = tuple(ivars)
        self.terms = {}
        for (pw, ex), c in (terms or {}).items():
            self._accumulate(tuple(pw), tuple(_snap_exp(num(a)) for a in ex), Poly.coerce(c))

    def _accumulate(self, pw, ex, c):
        if c.is_zero():
            return
        key = (pw, ex)
        if key not in self.terms and not all(is_exact(a) for a in ex):
            for (pw2, ex2) in self.terms:
                if pw2 == pw and all(_exp_close(a, b) for a, b in zip(ex, ex2)):
                    key = (pw2, ex2)
                    break
        v = self.terms.get(key)
        v = c if v is None else v + c
        if v.is_zero():
            self.terms.pop(key, None)
        else:
            self.terms[key] = v

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, ivars):
        return cls(ivars)

    @classmethod
    def const(cls, ivars, c):
        n = len(tuple(ivars))
        return cls(ivars, {((0,) * n, (ZERO,) * n): Poly.coerce(c)})

    @classmethod
    def monomial(cls, ivars, coeff=1, powers=None, exponents=None):
        ivars = tuple(ivars)
        powers = powers or {}
        exponents = exponents or {}
        pw = tuple(int(powers.get(v, 0)) for v in ivars)
        ex = tuple(num(exponents.get(v, 0)) for v in ivars)
        return cls(ivars, {(pw, ex): Poly.coerce(coeff)})

    @classmethod
    def exp(cls, ivars, exponents, coeff=1):
        return cls.monomial(ivars, coeff, None, exponents)

    # -- shape -------------------------------------------------------------
    def with_ivars(self, ivars):
        """Re-express over a superset of independent variables."""
        ivars = tuple(ivars)
        if ivars == self.ivars:
            return self
        missing = set(self.ivars) - set(ivars)
        if missing:
            raise ValueError(f"cannot drop independent variables {sorted(missing)}")
        idx = [self.ivars.index(v) if v in self.ivars else None for v in ivars]
        out = {}
        for (pw, ex), c in self.terms.items():
            npw = tuple(pw[i] if i is not None else 0 for i in idx)
            nex = tuple(ex[i] if i is not None else ZERO for i in idx)
            out[(npw, nex)] = c
        return ExpPoly(ivars, out)

    def _align(self, other):
        if self.ivars == other.ivars:
            return self, other
        ivars = tuple(dict.fromkeys(self.ivars + other.ivars))
        return self.with_ivars(ivars), other.with_ivars(ivars)

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_exact(self):
        return all(c.is_exact() and all(is_exact(a) for a in ex)
                   for (_, ex), c in self.terms.items())

    def constants(self):
        out = set()
        for c in self.terms.values():
            out |= {s for s in c.symbols() if isinstance(s, ConstSymbol)}
        return out

    def exponents(self):
        return {ex for (_, ex) in self.terms}

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, ExpPoly):
            other = ExpPoly.const(self.ivars, other)
        a, b = self._align(other)
        out = ExpPoly(a.ivars)
        out.terms = dict(a.terms)
        for (pw, ex), c in b.terms.items():
            out._accumulate(pw, ex, c)
        return out

    __radd__ = __add__

    def __neg__(self):
        out = ExpPoly(self.ivars)
        out.terms = {k: -c for k, c in self.terms.items()}
        return out

    def __sub__(self, other):
        if not isinstance(other, ExpPoly):
            other = ExpPoly.const(self.ivars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = Poly.coerce(c)
        out = ExpPoly(self.ivars)
        for k, v in self.terms.items():
            out._accumulate(k[0], k[1], v * c)
        return out

    def __mul__(self, other):
        if not isinstance(other, ExpPoly):
            return self.scale(other)
        a, b = self._align(other)
        out = ExpPoly(a.ivars)
        for (pa, ea), ca in a.terms.items():
            for (pb, eb), cb in b.terms.items():
                pw = tuple(x + y for x, y in zip(pa, pb))
                ex = tuple(_snap_exp(x + y) for x, y in zip(ea, eb))
                out._accumulate(pw, ex, ca * cb)
        return out

    __rmul__ = __mul__

    def shift(self, ivar, a):
        """Multiply by ``exp(a * ivar)``."""
        a = num(a)
        f = self if ivar in self.ivars else self.with_ivars(self.ivars + (ivar,))
        i = f.ivars.index(ivar)
        out = ExpPoly(f.ivars)
        for (pw, ex), c in f.terms.items():
            ex2 = ex[:i] + (_snap_exp(ex[i] + a),) + ex[i + 1:]
            out._accumulate(pw, ex2, c)
        return out

    def __eq__(self, other):
        if not isinstance(other, ExpPoly):
            if other == 0:
                return self.is_zero()
            return NotImplemented
        a, b = self._align(other)
        return (a - b).is_zero()

    __hash__ = None

    def max_abs_coeff(self):
        """Largest coefficient magnitude (constants and parameters excluded)."""
        best = 0.0
        for c in self.terms.values():
            for v in c.terms.values():
                best = max(best, abs(complex(v)))
        return best

    def map_coeffs(self, fn):
        out = ExpPoly(self.ivars)
        for (pw, ex), c in self.terms.items():
            out._accumulate(pw, ex, fn(c))
        return out

    def subs(self, mapping):
        """Substitute constants/parameters inside coefficients."""
        return self.map_coeffs(lambda c: c.subs(mapping))

    def drop_constants(self):
        """Set every integration constant to zero."""
        cs = self.constants()
        return self.subs({c: 0 for c in cs}) if cs else self

    def part_with_constants(self):
        out = ExpPoly(self.ivars)
        for (pw, ex), c in self.terms.items():
            if any(isinstance(s, ConstSymbol) for s in c.symbols()):
                out._accumulate(pw, ex, c)
        return out

    # -- calculus ------------------------------------------------------------
    def diff(self, ivar):
        if ivar not in self.ivars:
            return ExpPoly(self.ivars)
        i = self.ivars.index(ivar)
        out = ExpPoly(self.ivars)
        for (pw, ex), c in self.terms.items():
            k, a = pw[i], ex[i]
            if not _is_zero_exp(a):
                out._accumulate(pw, ex, c.scale(a))
            if k:
                pw2 = pw[:i] + (k - 1,) + pw[i + 1:]
                out._accumulate(pw2, ex, c.scale(GaussQ(k)))
        return out

    def integrate(self, ivar, pool=None, constant=True):
        f = self if ivar in self.ivars else self.with_ivars(self.ivars + (ivar,))
        i = f.ivars.index(ivar)
        out = ExpPoly(f.ivars)
        for (pw, ex), c in f.terms.items():
            k, a = pw[i], ex[i]
            if _is_zero_exp(a):
                pw2 = pw[:i] + (k + 1,) + pw[i + 1:]
                out._accumulate(pw2, ex, c.scale(GaussQ(1, 0) / (k + 1)))
                continue
            # int t^k e^{at} = e^{at} sum_j (-1)^j k!/(k-j)! t^{k-j} / a^{j+1}
            inv = (ONE / a) if is_exact(a) else 1 / a
            factor = inv
            falling = 1
            for j in range(k + 1):
                pw2 = pw[:i] + (k - j,) + pw[i + 1:]
                sign = -1 if j % 2 else 1
                out._accumulate(pw2, ex, c.scale(factor * (sign * falling)))
                falling *= k - j
                factor = factor * inv
        if constant:
            pool = pool or _default_pool
            sym = pool.fresh(f"integration in {ivar}")
            n = len(f.ivars)
            out._accumulate((0,) * n, (ZERO,) * n, Poly.symbol(sym))
        return out

    # -- evaluation ----------------------------------------------------------
    def evaluate(self, point, assignment=None):
        """Value at ``point`` (mapping ivar -> number)."""
        vals = self.evaluate_grid({v: np.asarray([point[v]]) for v in self.ivars if v in point},
                                  assignment)
        return complex(vals[0])

    def evaluate_grid(self, points, assignment=None):
        """Vectorized evaluation; ``points`` maps ivar -> 1d array (same length)."""
        assignment = assignment or {}
        arrays = [np.asarray(points[v], dtype=complex) if v in points else None
                  for v in self.ivars]
        n = next((len(a) for a in arrays if a is not None), 1)
        total = np.zeros(n, dtype=complex)
        for (pw, ex), c in self.terms.items():
            try:
                cv = c.evaluate(assignment)
            except UnboundSymbol as err:
                missing = [s for s in c.symbols() if s not in assignment]
                if any(isinstance(s, ConstSymbol) for s in missing):
                    raise UnboundConstant(str(err)) from None
                raise
            term = np.full(n, cv, dtype=complex)
            for arr, k, a in zip(arrays, pw, ex):
                if arr is None:
                    if k or not _is_zero_exp(a):
                        raise UnboundSymbol("independent variable not supplied")
                    continue
                if k:
                    term = term * arr ** k
                if not _is_zero_exp(a):
                    term = term * np.exp(complex(a) * arr)
            total += term
        return total

    # -- printing --------------------------------------------------------------
    def sorted_terms(self):
        def key(item):
            (pw, ex), c = item
            return (tuple((complex(a).real, complex(a).imag) for a in ex), pw)
        return sorted(self.terms.items(), key=key)

    def __str__(self):
        return format_exppoly(self)

    def __repr__(self):
        return f"ExpPoly({str(self)!r})"


def format_exppoly(f, mul="*"):
    if not f.terms:
        return "0"
    from .scalar import format_poly

    parts = []
    for (pw, ex), c in f.sorted_terms():
        factors = []
        for v, k in zip(f.ivars, pw):
            if k:
                factors.append(v if k == 1 else f"{v}^{k}")
        lin = []
        for v, a in zip(f.ivars, ex):
            if not _is_zero_exp(a):
                lin.append(f"{_exp_coeff_str(a)}{v}")
        if lin:
            factors.append("exp(" + " + ".join(lin) + ")")
        cs = format_poly(c)
        if len(c.terms) > 1:
            cs = f"({cs})"
        if factors:
            if cs == "1":
                body = mul.join(factors)
            elif cs == "-1":
                body = "-" + mul.join(factors)
            else:
                body = mul.join([cs] + factors)
        else:
            body = cs
        parts.append(body)
    out = parts[0]
    for p in parts[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


def _exp_coeff_str(a):
    if a == 1:
        return ""
    if a == -1:
        return "-"
    s = format_scalar(a)
    if isinstance(a, GaussQ) and a.im and not a.re:
        s = f"({s})"
    return f"{s}*"


def diff_expfunc(f, ivar):
    """Exact derivative of ``f`` with respect to ``ivar``."""
    return f.diff(ivar)


def integrate_expfunc(f, ivar, pool=None, constant=True):
    """Antiderivative plus a fresh integration constant (``1/D 0 = c``)."""
    return f.integrate(ivar, pool=pool, constant=constant)


def apply_inverse_first_order(a, f, ivar, pool=None, constant=True):
    """Full solution of ``(D + a) x = f``: ``exp(-a t) * int exp(a t) f dt``."""
    a = num(a)
    inner = f.shift(ivar, a)
    return inner.integrate(ivar, pool=pool, constant=constant).shift(ivar, -a)
