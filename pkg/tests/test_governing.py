"""Governing equations by elimination, by determinant, and with variable coefficients."""

import random

import pytest

from daekit.errors import SingularSystem, VcConditionViolated, VcUnsupportedHere
from daekit.governing import eliminate_governing, govern, governing_via_determinant, vc_governing
from daekit.operators import FuncSymbol, OperatorPoly, VcOperator
from daekit.scalar import Poly, RatFunc
from daekit.system import ForcingSymbol, operator_det
from strategies import corpus, random_system


def sym(name, ov=("D_t",)):
    return OperatorPoly(RatFunc.coerce(Poly.symbol(name)), ov)


def rhs_map(g):
    return {f.name if isinstance(f, ForcingSymbol) else j: q for j, q, f in g.rhs}


def test_generic_2x2_closed_form():
    g = eliminate_governing(corpus("generic_2x2.dae"), "x2")
    P11, P12, P21, P22 = (sym(n) for n in ("P11", "P12", "P21", "P22"))
    assert g.lhs == P11 * P22 - P21 * P12
    r = rhs_map(g)
    assert r["f1"] == -P21 and r["f2"] == P11


def test_generic_3x3_closed_form():
    g = eliminate_governing(corpus("generic_3x3.dae"), "x3")
    P = {f"P{i}{j}": sym(f"P{i}{j}") for i in "123" for j in "123"}
    want = ((P["P11"] * P["P22"] - P["P12"] * P["P21"]) * P["P33"]
            + P["P12"] * P["P23"] * P["P31"]
            + P["P13"] * (P["P21"] * P["P32"] - P["P22"] * P["P31"])
            - P["P11"] * P["P23"] * P["P32"])
    assert g.lhs == want
    r = rhs_map(g)
    assert r["f1"] == P["P21"] * P["P32"] - P["P22"] * P["P31"]
    assert r["f2"] == -(P["P11"] * P["P32"] - P["P31"] * P["P12"])
    assert r["f3"] == P["P11"] * P["P22"] - P["P21"] * P["P12"]


def test_target_choice_reorders():
    s = corpus("generic_2x2.dae")
    g = eliminate_governing(s, "x1")
    P11, P12, P21, P22 = (sym(n) for n in ("P11", "P12", "P21", "P22"))
    # same determinant up to sign, Cramer cofactors for x1
    assert g.lhs == P11 * P22 - P21 * P12 or g.lhs == -(P11 * P22 - P21 * P12)
    r = rhs_map(g)
    sign = 1 if g.lhs == P11 * P22 - P21 * P12 else -1
    assert r["f1"] == P22 * sign and r["f2"] == -P12 * sign


def test_routes_agree_on_random_systems():
    rng = random.Random(11)
    for _ in range(25):
        s = random_system(rng, rng.randint(2, 3))
        target = rng.choice(s.dvars)
        a = eliminate_governing(s, target, monic=True)
        b = governing_via_determinant(s, target, monic=True)
        assert a.lhs == b.lhs
        ra, rb = rhs_map(a), rhs_map(b)
        for k in set(ra) | set(rb):
            assert ra.get(k, OperatorPoly(0)) == rb.get(k, OperatorPoly(0))


def test_determinant_route_equals_det():
    s = corpus("chain3.dae")
    assert governing_via_determinant(s, "x3").lhs == operator_det(s)


def test_monic_coupled_lines():
    g = govern(corpus("coupled_tl.dae"), "Vb", monic=True)
    Dx = OperatorPoly.D("x")
    ov = ("D_x",)
    Zst, Zpt, Zsb, al, be, Ybp = (sym(n, ov) for n in ("Zst", "Zpt", "Zsb", "alpha", "beta", "Ybp"))
    mid = (Zst.rf / Zpt.rf + al.rf * be.rf * Zsb.rf / Zpt.rf + Zsb.rf * Ybp.rf)
    low = Zst.rf * Zsb.rf * Ybp.rf / Zpt.rf
    want = Dx ** 4 - OperatorPoly(mid, ov) * Dx ** 2 + OperatorPoly(low, ov)
    assert g.lhs == want
    assert g.rhs == []


def test_algebraic_row():
    g = govern(corpus("auditory.dae"), "Vbm", monic=True)
    Dx = OperatorPoly.D("x")
    ov = ("D_x",)
    assert g.lhs == Dx ** 2 + OperatorPoly(Poly.symbol("Z"), ov) / Poly.symbol("Zf")


def test_pde_line():
    s = corpus("pde_tl.dae")
    ov = ("D_t", "D_x")
    Dt, Dx = OperatorPoly(OperatorPoly.D("t"), ov), OperatorPoly(OperatorPoly.D("x"), ov)
    L, R, L1 = sym("L", ov), sym("R", ov), sym("L1", ov)
    invC = OperatorPoly(RatFunc.coerce(1) / RatFunc.coerce(Poly.symbol("C")), ov)
    want = (L * Dt ** 2 + R * Dt + invC) * Dx ** 2 - L1 * Dt ** 2
    assert eliminate_governing(s, "v").lhs == want
    assert governing_via_determinant(s, "v").lhs == want
    assert s.row_notes == ((0, {"t": 1}),)


def test_vc_target_v():
    s = corpus("tl_vc.dae")
    g = vc_governing(s, "V")
    Y = Poly.symbol(FuncSymbol("Y", 0, ("x", "w")))
    Z = Poly.symbol("Z")
    want = VcOperator({2: RatFunc.coerce(1), 0: RatFunc.coerce(-(Z * Y))}, "x")
    assert g.lhs == want
    r = rhs_map(g)
    assert r["f1"] == OperatorPoly.D("x")
    assert r["f2"] == OperatorPoly(-Z, ("D_x",))


def test_vc_target_i_rejected():
    with pytest.raises(VcConditionViolated, match="last-column"):
        govern(corpus("tl_vc.dae"), "I")


def test_vc_needs_vc_route():
    with pytest.raises(VcUnsupportedHere):
        eliminate_governing(corpus("tl_vc.dae"), "V")


def test_singular_rejected():
    from daekit.dsl import parse_system

    s = parse_system("ivars: t; vars: x, y; eq: D x + D y = 0; eq: x + y = 0;").system
    with pytest.raises(SingularSystem):
        govern(s, "y")


def test_trace_records_pivots():
    g = eliminate_governing(corpus("chain3.dae"), "x3")
    ops = [step["op"] for step in g.trace]
    assert ops[0] == "order" and "clear" in ops


def test_reduce_cancels_block_factor():
    s = corpus("separable_decoupled.dae")
    full = eliminate_governing(s, "v")
    ov = ("D_t", "D_x")
    Dt, Dx = OperatorPoly(OperatorPoly.D("t"), ov), OperatorPoly(OperatorPoly.D("x"), ov)
    assert full.lhs == (Dt + 1) * (Dx - 3)
    short = eliminate_governing(s, "v", reduce=True)
    assert short.lhs == Dx - 3
    assert any(step["op"] == "cancel" for step in short.trace)
