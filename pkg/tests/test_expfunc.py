"""Exponential polynomials: arithmetic, calculus and evaluation."""

import numpy as np
import pytest
import sympy
from hypothesis import given, settings

from daekit.errors import UnboundConstant, UnboundSymbol
from daekit.expfunc import ConstPool, ConstSymbol, ExpPoly, apply_inverse_first_order
from daekit.scalar import GaussQ, Poly
from strategies import exppolys, gaussq

T = ("t",)
t = sympy.Symbol("t")


def to_sympy(f):
    out = 0
    for (pw, ex), c in f.terms.items():
        cv = c.const_value()
        a = ex[0]
        out += (sympy.Rational(cv.re.numerator, cv.re.denominator)
                + sympy.I * sympy.Rational(cv.im.numerator, cv.im.denominator)) * t ** pw[0] * sympy.exp(
            (sympy.Rational(a.re.numerator, a.re.denominator)
             + sympy.I * sympy.Rational(a.im.numerator, a.im.denominator)) * t)
    return out


def test_build_and_print():
    f = ExpPoly.monomial(T, 2, {"t": 1}, {"t": -1}) + ExpPoly.const(T, 3)
    assert str(f) == "2*t*exp(-t) + 3"
    assert ExpPoly.zero(T).is_zero()


def test_like_terms_merge():
    f = ExpPoly.exp(T, {"t": 2}) + ExpPoly.exp(T, {"t": 2}, -1)
    assert f.is_zero()


def test_diff_of_t_exp():
    f = ExpPoly.monomial(T, 1, {"t": 1}, {"t": 3})
    want = ExpPoly.monomial(T, 3, {"t": 1}, {"t": 3}) + ExpPoly.exp(T, {"t": 3})
    assert f.diff("t") == want


@settings(max_examples=40)
@given(exppolys())
def test_diff_matches_sympy(f):
    assert sympy.simplify(to_sympy(f.diff("t")) - sympy.diff(to_sympy(f), t)) == 0


@settings(max_examples=40)
@given(exppolys())
def test_integrate_then_diff(f):
    g = f.integrate("t", constant=False)
    assert g.diff("t") == f


def test_integrate_adds_fresh_constant():
    pool = ConstPool("k")
    g = ExpPoly.const(T, 1).integrate("t", pool=pool)
    h = ExpPoly.const(T, 1).integrate("t", pool=pool)
    assert g.constants() == {ConstSymbol("k_1")}
    assert h.constants() == {ConstSymbol("k_2")}
    assert g.drop_constants() == ExpPoly.monomial(T, 1, {"t": 1})


@given(gaussq, exppolys())
def test_shift_composes(a, f):
    assert f.shift("t", a).shift("t", -a) == f


def test_evaluate_grid():
    f = ExpPoly.monomial(T, 2, {"t": 2}, {"t": GaussQ(0, 1)})
    ts = np.linspace(0, 1, 7)
    assert np.allclose(f.evaluate_grid({"t": ts}), 2 * ts ** 2 * np.exp(1j * ts))


def test_evaluate_needs_bindings():
    f = ExpPoly.const(T, Poly.symbol("k"))
    with pytest.raises(UnboundSymbol):
        f.evaluate({"t": 0.0})
    c = ConstSymbol("C_1")
    with pytest.raises(UnboundConstant):
        ExpPoly.const(T, Poly.symbol(c)).evaluate({"t": 0.0})


def test_inverse_first_order_resonant():
    # (D + 1) x = exp(-t) gives t exp(-t) + c exp(-t)
    f = ExpPoly.exp(T, {"t": -1})
    x = apply_inverse_first_order(1, f, "t", constant=False)
    assert x == ExpPoly.monomial(T, 1, {"t": 1}, {"t": -1})


def test_with_ivars_extends():
    f = ExpPoly.exp(T, {"t": 1})
    g = f.with_ivars(("x", "t"))
    assert g.diff("x").is_zero()
    assert g.diff("t") == g
