"""Exact scalar tower: Gaussian rationals, multivariate polynomials, rational functions.

Polynomials are sparse maps from monomials to coefficients.  A monomial is
a tuple of ``(symbol, exponent)`` pairs sorted by :func:`sym_key`; the empty
tuple is the constant monomial.  Symbols are plain strings (parameters and
operator symbols) or any hashable object exposing a ``sort_key`` tuple
(function symbols, integration constants).

Coefficients are :class:`GaussQ` (exact) or Python ``complex`` (floating,
produced only by numeric root finding).  Mixing the two gives ``complex``.

Rational functions keep their denominator as a tuple of monic factors and
never compute a multivariate gcd: every operation merely trial-divides the
numerator by each denominator factor.  Equality is decided by expanding the
cross product, see :func:`poly_expand_equal`.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

from .errors import DivisionByZero, NumericPole, UnboundSymbol

POLE_RTOL = 1e-12


class GaussQ:
    """Exact complex rational ``re + im*i``."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    @classmethod
    def parse(cls, text):
        """Parse ``'3'``, ``'-1/2'``, ``'2.5'``, ``'3i'`` or ``'1+2i'``."""
        s = text.replace(" ", "")
        if not s.endswith("i"):
            return cls(Fraction(s))
        body = s[:-1]
        for k in range(len(body) - 1, 0, -1):
            if body[k] in "+-" and body[k - 1] not in "eE/":
                return cls(Fraction(body[:k]), _imag_part(body[k:]))
        return cls(0, _imag_part(body))

    def __repr__(self):
        return f"GaussQ({self.re}, {self.im})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{_imag_str(self.im)}"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{_imag_str(abs(self.im))})"

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __eq__(self, other):
        if isinstance(other, GaussQ):
            return self.re == other.re and self.im == other.im
        if isinstance(other, Rational):
            return not self.im and self.re == other
        if isinstance(other, (float, complex)):
            return complex(self) == other
        return NotImplemented

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_real(self):
        return not self.im

    def conjugate(self):
        return GaussQ(self.re, -self.im)

    def abs2(self):
        return self.re * self.re + self.im * self.im

    def __neg__(self):
        return GaussQ(-self.re, -self.im)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, GaussQ):
            return GaussQ(self.re + other.re, self.im + other.im)
        if isinstance(other, Rational):
            return GaussQ(self.re + other, self.im)
        if isinstance(other, (float, complex)):
            return complex(self) + other
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, GaussQ):
            return GaussQ(self.re - other.re, self.im - other.im)
        if isinstance(other, Rational):
            return GaussQ(self.re - other, self.im)
        if isinstance(other, (float, complex)):
            return complex(self) - other
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, GaussQ):
            if not self.im and not other.im:
                return GaussQ(self.re * other.re)
            return GaussQ(self.re * other.re - self.im * other.im,
                          self.re * other.im + self.im * other.re)
        if isinstance(other, Rational):
            return GaussQ(self.re * other, self.im * other)
        if isinstance(other, (float, complex)):
            return complex(self) * other
        return NotImplemented

    __rmul__ = __mul__

    def inverse(self):
        n = self.abs2()
        if not n:
            raise DivisionByZero("division by exact zero")
        return GaussQ(self.re / n, -self.im / n)

    def __truediv__(self, other):
        if isinstance(other, GaussQ):
            if not other.im:
                if not other.re:
                    raise DivisionByZero("division by exact zero")
                return GaussQ(self.re / other.re, self.im / other.re)
            return self * other.inverse()
        if isinstance(other, Rational):
            if not other:
                raise DivisionByZero("division by exact zero")
            return GaussQ(self.re / other, self.im / other)
        if isinstance(other, (float, complex)):
            return complex(self) / other
        return NotImplemented

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def sqrt_exact(self):
        """Exact square root in Q(i), or None when it does not exist."""
        a, b = self.re, self.im
        if not b:
            if a >= 0:
                r = _rational_sqrt(a)
                return None if r is None else GaussQ(r)
            r = _rational_sqrt(-a)
            return None if r is None else GaussQ(0, r)
        m = _rational_sqrt(a * a + b * b)
        if m is None:
            return None
        x = _rational_sqrt((m + a) / 2)
        if x is None or not x:
            return None
        return GaussQ(x, b / (2 * x))


ZERO = GaussQ(0)
ONE = GaussQ(1)
I = GaussQ(0, 1)


def _imag_part(s):
    if s in ("", "+"):
        return Fraction(1)
    if s == "-":
        return Fraction(-1)
    return Fraction(s.rstrip("*"))


def _imag_str(v):
    return "i" if v == 1 else f"{v}i"


def _rational_sqrt(q):
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def num(x):
    """Coerce a Python number into the coefficient domain."""
    if isinstance(x, GaussQ):
        return x
    if isinstance(x, Rational):
        return GaussQ(x)
    if isinstance(x, float):
        return complex(x)
    if isinstance(x, complex):
        return x
    raise TypeError(f"not a scalar: {x!r}")


def is_exact(c):
    return isinstance(c, GaussQ)


def sym_key(s):
    if isinstance(s, str):
        return (0, s)
    return s.sort_key


def sym_str(s):
    return s if isinstance(s, str) else str(s)


def _mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for s, e in b:
        d[s] = d.get(s, 0) + e
    return tuple(sorted(d.items(), key=lambda it: sym_key(it[0])))


def _mono_div(a, b):
    """a / b as a monomial, or None if b does not divide a."""
    d = dict(a)
    for s, e in b:
        have = d.get(s, 0)
        if have < e:
            return None
        if have == e:
            del d[s]
        else:
            d[s] = have - e
    return tuple(sorted(d.items(), key=lambda it: sym_key(it[0])))


def mono_degree(m, syms=None):
    if syms is None:
        return sum(e for _, e in m)
    return sum(e for s, e in m if s in syms)


class Poly:
    """Sparse multivariate polynomial with Gaussian-rational coefficients."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        if terms is None:
            terms = {}
        self.terms = {m: c for m, c in terms.items() if c != 0}
        self._hash = None

    @classmethod
    def _raw(cls, terms):
        p = cls.__new__(cls)
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, c):
        c = num(c)
        return cls._raw({(): c} if c != 0 else {})

    @classmethod
    def symbol(cls, s, exp=1):
        return cls._raw({((s, exp),): ONE} if exp else {(): ONE})

    @classmethod
    def coerce(cls, x):
        if isinstance(x, Poly):
            return x
        if isinstance(x, (str,)) or hasattr(x, "sort_key"):
            return cls.symbol(x)
        return cls.const(x)

    # -- inspection --------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_const(self):
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def const_value(self):
        """Constant term as a scalar (ZERO if absent)."""
        return self.terms.get((), ZERO)

    def symbols(self):
        out = set()
        for m in self.terms:
            for s, _ in m:
                out.add(s)
        return out

    def degree(self, syms=None):
        if not self.terms:
            return -1
        if syms is not None and not isinstance(syms, (set, frozenset)):
            syms = set(syms)
        return max(mono_degree(m, syms) for m in self.terms)

    def degree_in(self, s):
        if not self.terms:
            return -1
        return max(dict(m).get(s, 0) for m in self.terms)

    def is_exact(self):
        return all(isinstance(c, GaussQ) for c in self.terms.values())

    def _order_key(self, allsyms=None):
        syms = sorted(allsyms if allsyms is not None else self.symbols(), key=sym_key)
        idx = {s: i for i, s in enumerate(syms)}
        n = len(syms)

        def key(m):
            v = [0] * n
            for s, e in m:
                v[idx[s]] = e
            return (sum(v), tuple(v))
        return key

    def sorted_terms(self):
        """Terms in descending graded-lexicographic order."""
        key = self._order_key()
        return sorted(self.terms.items(), key=lambda it: key(it[0]), reverse=True)

    def leading(self):
        key = self._order_key()
        m = max(self.terms, key=key)
        return m, self.terms[m]

    # -- equality ----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.terms == other.terms
        try:
            return self.terms == Poly.const(other).terms
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # -- ring operations ---------------------------------------------------
    def __neg__(self):
        return Poly._raw({m: -c for m, c in self.terms.items()})

    def __add__(self, other):
        if not isinstance(other, Poly):
            try:
                other = Poly.coerce(other)
            except TypeError:
                return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v = v + c
                if v == 0:
                    del out[m]
                else:
                    out[m] = v
        return Poly._raw(out)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Poly):
            try:
                other = Poly.coerce(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return Poly.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            if isinstance(other, (str,)) or hasattr(other, "sort_key"):
                other = Poly.symbol(other)
            else:
                try:
                    return self.scale(num(other))
                except TypeError:
                    return NotImplemented
        if not self.terms or not other.terms:
            return Poly._raw({})
        out = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = _mono_mul(ma, mb)
                v = out.get(m)
                out[m] = ca * cb if v is None else v + ca * cb
        return Poly._raw({m: c for m, c in out.items() if c != 0})

    __rmul__ = __mul__

    def scale(self, c):
        if c == 0:
            return Poly._raw({})
        return Poly._raw({m: v * c for m, v in self.terms.items()})

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result, base = Poly.const(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def mul_monomial(self, mono, c=ONE):
        return Poly._raw({_mono_mul(m, mono): v * c for m, v in self.terms.items()})

    def divexact(self, other):
        """Exact quotient ``self / other`` or None if ``other`` does not divide.

        Uses greedy division on graded-lex leading terms; when ``other``
        divides ``self`` the leading term of the remainder is always
        divisible, so failing that test proves non-divisibility.
        """
        if not other.terms:
            raise DivisionByZero("polynomial division by zero")
        if not self.terms:
            return Poly._raw({})
        if other.is_const():
            return self.scale(ONE / other.terms[()] if is_exact(other.terms[()])
                              else 1 / other.terms[()])
        key = self._order_key(self.symbols() | other.symbols())
        lm_b = max(other.terms, key=key)
        lc_b = other.terms[lm_b]
        rest_b = [(m, c) for m, c in other.terms.items() if m != lm_b]
        if not is_exact(lc_b) or not self.is_exact():
            return None
        r = dict(self.terms)
        q = {}
        while r:
            m = max(r, key=key)
            qm = _mono_div(m, lm_b)
            if qm is None:
                return None
            c = r.pop(m) / lc_b
            q[qm] = c
            for mb, cb in rest_b:
                mm = _mono_mul(qm, mb)
                v = r.get(mm, ZERO) - c * cb
                if v == 0:
                    r.pop(mm, None)
                else:
                    r[mm] = v
        return Poly._raw(q)

    def monomial_content(self):
        """Largest monomial dividing every term."""
        if not self.terms:
            return ()
        it = iter(self.terms)
        common = dict(next(it))
        for m in it:
            d = dict(m)
            for s in list(common):
                e = min(common[s], d.get(s, 0))
                if e:
                    common[s] = e
                else:
                    del common[s]
            if not common:
                break
        return tuple(sorted(common.items(), key=lambda it: sym_key(it[0])))

    # -- substitution / evaluation ------------------------------------------
    def subs(self, mapping):
        """Substitute symbols by scalars or polynomials (exact expansion)."""
        if not any(s in mapping for s in self.symbols()):
            return self
        cache = {}

        def power(s, e):
            k = (s, e)
            if k not in cache:
                cache[k] = Poly.coerce(mapping[s]) ** e
            return cache[k]

        out = Poly._raw({})
        for m, c in self.terms.items():
            kept = []
            factor = Poly.const(c)
            for s, e in m:
                if s in mapping:
                    factor = factor * power(s, e)
                else:
                    kept.append((s, e))
            out = out + factor.mul_monomial(tuple(kept))
        return out

    def coeffs_in(self, syms):
        """Split into ``{monomial in syms: Poly in remaining symbols}``."""
        syms = set(syms)
        out = {}
        for m, c in self.terms.items():
            inner = tuple((s, e) for s, e in m if s in syms)
            outer = tuple((s, e) for s, e in m if s not in syms)
            out.setdefault(inner, {})[outer] = c
        return {k: Poly._raw(v) for k, v in out.items()}

    def univariate_coeffs(self, s):
        """Dense coefficient list (ascending powers) in a single symbol ``s``.

        Raises ValueError if any other symbol appears.
        """
        if self.symbols() - {s}:
            raise ValueError("polynomial is not univariate")
        n = self.degree_in(s)
        out = [ZERO] * (n + 1)
        for m, c in self.terms.items():
            out[m[0][1] if m else 0] = c
        return out

    def evaluate(self, assignment):
        """Floating complex evaluation; every symbol must be bound."""
        return _eval_terms(self.terms, assignment)[0]

    # -- printing ----------------------------------------------------------
    def __repr__(self):
        return f"Poly({str(self)!r})"

    def __str__(self):
        return format_poly(self)


def _eval_terms(terms, assignment):
    total = 0j
    scale = 0.0
    for m, c in terms.items():
        v = complex(c)
        for s, e in m:
            try:
                x = assignment[s]
            except KeyError:
                raise UnboundSymbol(f"no value for symbol {sym_str(s)}") from None
            v *= complex(x) ** e
        total += v
        scale += abs(v)
    return total, scale


def format_scalar(c):
    if isinstance(c, GaussQ):
        return str(c)
    if isinstance(c, complex) and c.imag == 0:
        return repr(c.real)
    return repr(c)


def format_poly(p, sym=sym_str, mul="*"):
    if not p.terms:
        return "0"
    parts = []
    for m, c in p.sorted_terms():
        neg = False
        if isinstance(c, GaussQ) and not c.im and c.re < 0:
            neg, c = True, -c
        elif isinstance(c, complex) and c.imag == 0 and c.real < 0:
            neg, c = True, -c
        factors = [sym(s) if e == 1 else f"{sym(s)}^{e}" for s, e in m]
        if c == 1 and factors:
            body = mul.join(factors)
        else:
            cs = format_scalar(c)
            body = mul.join([cs] + factors)
        parts.append(("-" if neg else "+", body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


# ---------------------------------------------------------------------------
# rational functions
# ---------------------------------------------------------------------------

def _split_factor(f):
    """Normalize a denominator factor: returns (scalar, [monic factors])."""
    if f.is_const():
        return f.const_value(), []
    factors = []
    content = f.monomial_content()
    if content:
        f = Poly._raw({_mono_div(m, content): c for m, c in f.terms.items()})
        for s, e in content:
            factors.extend([Poly.symbol(s)] * e)
    scalar = ONE
    if not f.is_const():
        _, lc = f.leading()
        if lc != 1:
            inv = (ONE / lc) if is_exact(lc) else 1 / lc
            f = f.scale(inv)
            scalar = lc
        factors.append(f)
    else:
        scalar = f.const_value()
    return scalar, factors


class RatFunc:
    """Quotient ``num / prod(den)`` of polynomials with monic denominator factors."""

    __slots__ = ("num", "den")

    def __init__(self, num_=None, den=()):
        if num_ is None:
            num_ = Poly()
        num_ = Poly.coerce(num_)
        if isinstance(den, Poly):
            den = (den,)
        factors = []
        for f in den:
            f = Poly.coerce(f)
            if f.is_zero():
                raise DivisionByZero("zero denominator")
            s, fs = _split_factor(f)
            if s != 1:
                num_ = num_.scale(ONE / s if is_exact(s) else 1 / s)
            factors.extend(fs)
        self.num, self.den = _cancel(num_, factors)

    @classmethod
    def _raw(cls, n, den):
        r = cls.__new__(cls)
        r.num = n
        r.den = tuple(den)
        return r

    @classmethod
    def coerce(cls, x):
        if isinstance(x, RatFunc):
            return x
        return cls._raw(Poly.coerce(x), ())

    def den_poly(self):
        out = Poly.const(1)
        for f in self.den:
            out = out * f
        return out

    def is_zero(self):
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_poly(self):
        return not self.den

    def is_const(self):
        return not self.den and self.num.is_const()

    def symbols(self):
        out = self.num.symbols()
        for f in self.den:
            out |= f.symbols()
        return out

    def is_exact(self):
        return self.num.is_exact() and all(f.is_exact() for f in self.den)

    # -- arithmetic --------------------------------------------------------
    def __neg__(self):
        return RatFunc._raw(-self.num, self.den)

    def __add__(self, other):
        try:
            other = RatFunc.coerce(other)
        except TypeError:
            return NotImplemented
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if not self.den and not other.den:
            return RatFunc._raw(self.num + other.num, ())
        lcm, ca, cb = _factor_lcm(self.den, other.den)
        n = self.num * _prod(ca) + other.num * _prod(cb)
        return RatFunc._raw(*_cancel(n, lcm))

    __radd__ = __add__

    def __sub__(self, other):
        try:
            other = RatFunc.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return RatFunc.coerce(other) - self

    def __mul__(self, other):
        try:
            other = RatFunc.coerce(other)
        except TypeError:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return RatFunc._raw(Poly(), ())
        n = self.num * other.num
        if not self.den and not other.den:
            return RatFunc._raw(n, ())
        return RatFunc._raw(*_cancel(n, list(self.den) + list(other.den)))

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise DivisionByZero("division by the zero rational function")
        return RatFunc(self.den_poly(), (self.num,))

    def __truediv__(self, other):
        try:
            other = RatFunc.coerce(other)
        except TypeError:
            return NotImplemented
        if other.is_zero():
            raise DivisionByZero("division by the zero rational function")
        if other.is_const():
            c = other.num.const_value()
            return RatFunc._raw(self.num.scale(ONE / c if is_exact(c) else 1 / c), self.den)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return RatFunc.coerce(other) / self

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        return RatFunc._raw(*_cancel(self.num ** k, list(self.den) * k))

    def __eq__(self, other):
        try:
            other = RatFunc.coerce(other)
        except TypeError:
            return NotImplemented
        return poly_expand_equal(self, other)

    __hash__ = None

    def scale(self, c):
        return RatFunc._raw(self.num.scale(c), self.den)

    def subs(self, mapping):
        n = self.num.subs(mapping)
        if not self.den:
            return RatFunc._raw(n, ())
        return RatFunc(n, tuple(f.subs(mapping) for f in self.den))

    def evaluate(self, assignment, rtol=POLE_RTOL):
        return complex_eval(self, assignment, rtol)

    def __repr__(self):
        return f"RatFunc({str(self)!r})"

    def __str__(self):
        return format_ratfunc(self)


def _prod(fs):
    out = Poly.const(1)
    for f in fs:
        out = out * f
    return out


def _factor_lcm(da, db):
    """lcm of two factor multisets plus the cofactors completing each side."""
    count_a, count_b = {}, {}
    for f in da:
        count_a[f] = count_a.get(f, 0) + 1
    for f in db:
        count_b[f] = count_b.get(f, 0) + 1
    lcm, ca, cb = [], [], []
    for f in list(dict.fromkeys(list(da) + list(db))):
        a, b = count_a.get(f, 0), count_b.get(f, 0)
        k = max(a, b)
        lcm.extend([f] * k)
        ca.extend([f] * (k - a))
        cb.extend([f] * (k - b))
    return lcm, ca, cb


def _cancel(n, factors):
    if n.is_zero():
        return n, ()
    kept = []
    for f in factors:
        q = n.divexact(f)
        if q is None:
            kept.append(f)
        else:
            n = q
    kept.sort(key=lambda f: (f.degree(), str(f)))
    return n, tuple(kept)


def ratfunc_arith(a, b, op):
    """Exact ``a (op) b`` for op in {'add','sub','mul','div'}."""
    a, b = RatFunc.coerce(a), RatFunc.coerce(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def poly_expand_equal(a, b):
    """True iff ``a.num*b.den - b.num*a.den`` expands to zero."""
    a, b = RatFunc.coerce(a), RatFunc.coerce(b)
    if not a.den and not b.den:
        return (a.num - b.num).is_zero()
    return (a.num * b.den_poly() - b.num * a.den_poly()).is_zero()


def complex_eval(p, assignment, rtol=POLE_RTOL):
    """Evaluate a Poly or RatFunc in floating complex arithmetic."""
    if isinstance(p, Poly):
        return p.evaluate(assignment)
    if not isinstance(p, RatFunc):
        return complex(num(p))
    n, _ = _eval_terms(p.num.terms, assignment)
    d = 1 + 0j
    for f in p.den:
        v, scale = _eval_terms(f.terms, assignment)
        if abs(v) <= rtol * max(scale, 1e-300):
            raise NumericPole(f"denominator factor {f} vanishes")
        d *= v
    return n / d


def format_ratfunc(r, sym=sym_str):
    n = format_poly(r.num, sym)
    if not r.den:
        return n
    if len(r.num.terms) > 1:
        n = f"({n})"
    dens = []
    for f in r.den:
        s = format_poly(f, sym)
        dens.append(f"({s})" if len(f.terms) > 1 else s)
    d = "*".join(dens)
    if len(r.den) > 1:
        d = f"({d})"
    return f"{n}/{d}"
