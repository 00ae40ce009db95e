"""Hypothesis strategies and small builders shared by the test modules."""

import sympy
from hypothesis import strategies as st

from daekit.expfunc import ExpPoly
from daekit.operators import OperatorPoly
from daekit.scalar import GaussQ, Poly, RatFunc

SYMS = ("a", "b", "c")

small_fracs = st.fractions(min_value=-5, max_value=5, max_denominator=6)
gaussq = st.builds(GaussQ, small_fracs, small_fracs)
real_q = st.builds(GaussQ, small_fracs)
nonzero_gaussq = gaussq.filter(bool)


@st.composite
def polys(draw, syms=SYMS, max_terms=4, max_deg=2):
    p = Poly()
    for _ in range(draw(st.integers(0, max_terms))):
        mono = Poly.const(draw(gaussq))
        for s in syms:
            k = draw(st.integers(0, max_deg))
            if k:
                mono = mono * Poly.symbol(s, k)
        p = p + mono
    return p


nonzero_polys = polys().filter(lambda p: not p.is_zero())


@st.composite
def ratfuncs(draw):
    n = draw(polys())
    d = draw(polys(max_terms=2, max_deg=1).filter(lambda p: not p.is_zero()))
    return RatFunc(n, (d,))


@st.composite
def operators(draw, ivar="t", max_deg=3, exact=True):
    cs = [draw(real_q if exact else gaussq) for _ in range(draw(st.integers(1, max_deg + 1)))]
    return OperatorPoly.from_coeffs(cs, ivar)


@st.composite
def exppolys(draw, ivar="t", max_terms=3):
    f = ExpPoly.zero((ivar,))
    for _ in range(draw(st.integers(1, max_terms))):
        c = draw(nonzero_gaussq)
        k = draw(st.integers(0, 2))
        a = draw(st.builds(GaussQ, st.integers(-2, 2), st.integers(-2, 2)))
        f = f + ExpPoly.monomial((ivar,), c, {ivar: k}, {ivar: a})
    return f


def to_sympy(p):
    """Poly -> sympy expression over symbols named like ours."""
    out = sympy.Integer(0)
    for mono, c in p.terms.items():
        term = sympy.Rational(c.re.numerator, c.re.denominator) + sympy.I * sympy.Rational(
            c.im.numerator, c.im.denominator)
        for s, e in mono:
            term *= sympy.Symbol(str(s)) ** e
        out += term
    return sympy.expand(out)



def random_operator_matrix(rng, n, max_deg=2, density=0.7):
    """Random n x n matrix of univariate operators with small rational coefficients."""
    from fractions import Fraction

    rows = []
    for _ in range(n):
        row = []
        for _ in range(n):
            if rng.random() > density:
                row.append(OperatorPoly(0, ("D_t",)))
                continue
            deg = rng.randint(0, max_deg)
            cs = [GaussQ(Fraction(rng.randint(-6, 6), rng.randint(1, 4))) for _ in range(deg + 1)]
            row.append(OperatorPoly.from_coeffs(cs, "t"))
        rows.append(row)
    return rows


def random_system(rng, n, max_deg=2):
    """Nonsingular random constant-coefficient system with opaque forcing."""
    from daekit.system import DaeSystem, ForcingSymbol, operator_det

    while True:
        s = DaeSystem(("t",), tuple(f"x{i + 1}" for i in range(n)),
                      random_operator_matrix(rng, n, max_deg),
                      tuple(ForcingSymbol(f"f{i + 1}", ("t",)) for i in range(n)))
        if all(any(not e.is_zero() for e in row) for row in s.matrix) and \
                not operator_det(s).is_zero():
            return s


def corpus(name):
    from daekit import corpus_path
    from daekit.dsl import parse_file

    return parse_file(corpus_path(name)).system
