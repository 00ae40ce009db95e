"""Full and particular solutions of constant-coefficient systems."""

from fractions import Fraction

import pytest

from daekit.errors import RepeatedRoots, SymbolicCoefficientsRemain
from daekit.expfunc import ConstSymbol, ExpPoly
from daekit.numcheck import check_solution
from daekit.operators import OperatorPoly
from daekit.roots import find_roots
from daekit.scalar import GaussQ
from daekit.solver import (
    NotSeparable,
    exact_particular,
    factor_univariate_product,
    invert_operator_matrix,
    partial_fractions,
    solve,
    solve_full,
)
from daekit.system import operator_det
from strategies import corpus

T = ("t",)
UNIT = {"m1": 1, "m2": 1, "k1": 1, "k2": 1}


def complementary_exponents(x):
    return {ex[0] for (pw, ex), c in x.terms.items()
            if any(isinstance(s, ConstSymbol) for s in c.symbols())}


def test_exp_forcing_exact():
    x = solve_full(corpus("exp_forcing.dae"))["x"]
    want = ExpPoly.exp(T, {"t": GaussQ(0, 3)}, GaussQ(Fraction(-7, 130), Fraction(9, 130)))
    assert x.drop_constants() == want
    assert complementary_exponents(x) == {GaussQ(1), GaussQ(2)}


def test_both_modes_agree_on_simple_roots():
    s = corpus("exp_forcing.dae")
    a = solve_full(s)["x"].drop_constants()
    b = solve_full(s, mode="partial_fractions")["x"].drop_constants()
    assert a == b


def test_repeated_roots():
    x = solve_full(corpus("repeated_root.dae"))["x"]
    part = ExpPoly.monomial(T, Fraction(1, 2), {"t": 2}) + ExpPoly.monomial(T, -2, {"t": 1})
    assert x.drop_constants() == part
    keys = {(pw[0], ex[0]) for (pw, ex), c in x.terms.items() if c.symbols()}
    assert keys == {(0, GaussQ(-1)), (1, GaussQ(-1)), (0, GaussQ(0))}


def test_repeated_roots_refuse_partial_fractions():
    with pytest.raises(RepeatedRoots):
        solve_full(corpus("repeated_root.dae"), mode="partial_fractions")


def test_particular_only():
    x = solve_full(corpus("repeated_root.dae"), particular_only=True)["x"]
    assert not x.constants()
    assert str(x) == "-2*t + 1/2*t^2"


def test_constant_forcing_ab():
    s = corpus("const_forcing.dae")
    for mode in ("factorization", "partial_fractions"):
        x = solve_full(s, mode=mode, assignment={"a": 1, "b": 2, "fo": 6})["x"]
        assert x.drop_constants() == ExpPoly.const(T, -3)
        assert complementary_exponents(x) == {GaussQ(1), GaussQ(-2)}


def test_mass_spring_particular():
    s = corpus("massspring.dae")
    for mode in ("factorization", "partial_fractions"):
        sol = solve_full(s, mode=mode, assignment={**UNIT, "f1": 1})
        assert sol["x2"].drop_constants() == ExpPoly.const(T, 1)
        assert sol["x1"].drop_constants() == ExpPoly.const(T, 2)


def test_mass_spring_symbolic_force():
    # f1 left symbolic in the forcing is fine once the matrix is numeric
    sol = solve_full(corpus("massspring.dae"), assignment=UNIT)
    from daekit.scalar import Poly

    assert sol["x2"].drop_constants() == ExpPoly.const(T, Poly.symbol("f1"))


def test_inverse_is_two_sided():
    s = corpus("massspring.dae").subs(UNIT)
    inv = invert_operator_matrix(s)
    assert inv.check(s)


def test_partial_fraction_coefficients():
    p = OperatorPoly.from_coeffs([2, -3, 1])
    pf = partial_fractions(p, find_roots([2, -3, 1]))
    # 1/((D-1)(D-2)) = -1/(D-1) + 1/(D-2)
    assert sorted(pf.terms, key=lambda ga: complex(ga[1]).real) == [
        (GaussQ(1), GaussQ(-2)), (GaussQ(-1), GaussQ(-1))]
    assert pf.recombine_residual([GaussQ(2), GaussQ(-3), GaussQ(1)]) == 0


def test_exact_particular_resonance():
    q = [GaussQ(4), GaussQ(0), GaussQ(1)]
    phi = ExpPoly.exp(T, {"t": GaussQ(0, 2)})
    y = exact_particular(q, phi, "t")
    from daekit.operators import apply_operator

    assert apply_operator(OperatorPoly.from_coeffs(q), y) == phi
    assert y == ExpPoly.monomial(T, GaussQ(0, Fraction(-1, 4)), {"t": 1}, {"t": GaussQ(0, 2)})


def test_symbolic_system_refused():
    with pytest.raises(SymbolicCoefficientsRemain):
        solve(corpus("coupled_tl.dae"))


def test_corpus_ode_solutions_pass_residuals():
    for name in ("chain3.dae", "triangular3.dae", "polyforcing.dae", "massspring_damped.dae",
                 "rlc_series.dae", "algebraic2.dae", "resonant.dae"):
        s = corpus(name)
        if name == "chain3.dae":
            s = s.with_forcing([ExpPoly.exp(T, {"t": 2}), ExpPoly.const(T, 1),
                                ExpPoly.monomial(T, 1, {"t": 1})])
        assert check_solution(s, solve(s)).passed, name


def test_separable_decoupled():
    sol = solve(corpus("separable_decoupled.dae"))
    X = ("x", "t")
    assert sol["u"].drop_constants() == ExpPoly.exp(X, {"t": -2}, -1)
    assert sol["v"].drop_constants().is_zero()
    assert check_solution(corpus("separable_decoupled.dae"), sol).passed


def test_separable_product():
    s = corpus("separable_product.dae")
    sol = solve(s)
    assert check_solution(s, sol).passed


def test_factor_product():
    s = corpus("separable_product.dae")
    parts = factor_univariate_product(operator_det(s))
    assert sorted(str(p) for p in parts) == ["D_t + 1", "D_x^2 - 4"]


def test_wave_not_separable():
    res = factor_univariate_product(operator_det(corpus("wave_numeric.dae")))
    assert isinstance(res, NotSeparable) and not res
    assert isinstance(solve(corpus("wave_numeric.dae")), NotSeparable)
