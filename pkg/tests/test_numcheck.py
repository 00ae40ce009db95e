"""Residual checks, the RK4 oracle and finite differences."""

import numpy as np
import pytest

from daekit.errors import NotReducible
from daekit.expfunc import ExpPoly
from daekit.numcheck import (
    Grid,
    check_solution,
    default_rng,
    finite_diff_check,
    relate_constants,
    residual_check,
    rk4_oracle,
)
from daekit.operators import OperatorPoly
from daekit.scalar import GaussQ
from daekit.solver import solve
from strategies import corpus

T = ("t",)
D = OperatorPoly.D("t")
UNIT = {"m1": 1, "m2": 1, "k1": 1, "k2": 1, "f1": 1}


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid("t", 1.0, 0.0)
    with pytest.raises(ValueError):
        Grid("t", 0.0, 1.0, 1)


def test_exact_solution_has_zero_residual():
    s = corpus("exp_forcing.dae")
    rep = check_solution(s, solve(s))
    assert rep.passed and rep.max_residual == 0.0 and rep.tol == 1e-8


def test_perturbed_solution_fails():
    s = corpus("exp_forcing.dae")
    x = solve(s)["x"]
    bad = {"x": x + ExpPoly.monomial(T, GaussQ(1, 0) / 1000, {"t": 1})}
    assert not check_solution(s, bad).passed


def test_related_constants_satisfy_coupling():
    s = corpus("massspring.dae").subs(UNIT)
    sol = solve(s)
    a = relate_constants(s, sol, default_rng(1))
    assert residual_check(s, sol, a, tol=1e-10).passed
    # independent random values do not satisfy the coupled rows
    rng = np.random.default_rng(1)
    rnd = {c: rng.uniform(-1, 1) for c in a}
    assert not residual_check(s, sol, rnd, tol=1e-6).passed


def test_rk4_agrees_and_converges():
    s = corpus("massspring.dae").subs(UNIT)
    sol = solve(s)
    a = relate_constants(s, sol, default_rng(0))
    coarse = rk4_oracle(s, sol, a, Grid("t", 0, 2, 101))
    fine = rk4_oracle(s, sol, a, Grid("t", 0, 2, 201))
    assert fine < 1e-8
    # fourth order: halving the step cuts the error about 16 times
    assert 10 < coarse / fine < 25


def test_rk4_refuses_algebraic_leading_matrix():
    from daekit.dsl import parse_system

    s = parse_system("ivars: t; vars: x, y; eq: D x + D y = exp(t); eq: x - y = 0;").system
    with pytest.raises(NotReducible):
        rk4_oracle(s, solve(s))


def test_rk4_on_purely_algebraic_system():
    s = corpus("algebraic2.dae")
    assert rk4_oracle(s, solve(s)) < 1e-12


def test_finite_differences():
    t2 = ExpPoly.monomial(T, 1, {"t": 2})
    et = ExpPoly.exp(T, {"t": 1})
    assert finite_diff_check(D, t2, 0.3) < 1e-10
    assert finite_diff_check(D ** 2 + D * 3, et, 0.7) < 1e-8
    assert finite_diff_check(OperatorPoly(1, ("D_t",)), et, 0.2) < 1e-15


def test_report_json():
    s = corpus("exp_forcing.dae")
    rep = check_solution(s, solve(s))
    d = rep.to_dict()
    assert d["passed"] is True and d["grid"]["points"] == 101


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("DAEKIT_SEED", "7")
    a = default_rng().uniform()
    monkeypatch.setenv("DAEKIT_SEED", "7")
    assert default_rng().uniform() == a
