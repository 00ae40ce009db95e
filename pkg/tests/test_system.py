"""DaeSystem validation, classification and determinants."""

import random

import pytest

from daekit.errors import NonSquare, SingularSystem, UnknownVariable
from daekit.expfunc import ExpPoly
from daekit.operators import OperatorPoly
from daekit.scalar import RatFunc
from daekit.system import DaeSystem, determinant, operator_det, reorder_target_last, validate_system
from strategies import corpus, random_system

D = OperatorPoly.D("t")
Z = ExpPoly.zero(("t",))


def test_kinds():
    assert validate_system(corpus("massspring.dae")).tag == "cc-ODAE"
    assert validate_system(corpus("pde_tl.dae")).tag == "cc-PDAE"
    k = validate_system(corpus("tl_vc.dae"))
    assert k.is_vc and k.vc_columns == {1}


def test_non_square():
    s = DaeSystem(("t",), ("x", "y"), [[D, D]], [Z])
    with pytest.raises(NonSquare):
        validate_system(s)


def test_singular():
    s = DaeSystem(("t",), ("x", "y"), [[D, D], [D * 2, D * 2]], [Z, Z])
    with pytest.raises(SingularSystem):
        validate_system(s)


def test_zero_row_is_singular():
    zero = OperatorPoly(0, ("D_t",))
    s = DaeSystem(("t",), ("x", "y"), [[zero, zero], [D, 1]], [Z, Z])
    with pytest.raises(SingularSystem):
        validate_system(s)


def test_unknown_target():
    with pytest.raises(UnknownVariable):
        corpus("massspring.dae").index("x3")


def test_chain3_determinant():
    # D^2*(D(D+1)+1) - 1, expanded
    assert operator_det(corpus("chain3.dae")) == D ** 4 + D ** 3 + D ** 2 - 1


def test_determinant_against_leibniz():
    from itertools import permutations

    rng = random.Random(5)
    for n in (1, 2, 3, 4):
        s = random_system(rng, n)
        rows = [[e.rf for e in r] for r in s.matrix]
        total = RatFunc.coerce(0)
        for perm in permutations(range(n)):
            inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
            term = RatFunc.coerce(1)
            for i, j in enumerate(perm):
                term = term * rows[i][j]
            total = total - term if inv % 2 else total + term
        assert determinant(rows) == total


def test_reorder_keeps_determinant_up_to_sign():
    s = corpus("mixed4.dae")
    s2 = reorder_target_last(s, "x2")
    assert s2.dvars[-1] == "x2"
    d1, d2 = operator_det(s), operator_det(s2)
    assert d1 == d2 or d1 == -d2


def test_subs_drops_params():
    s = corpus("massspring.dae").subs({"m1": 1, "m2": 1})
    assert s.params == ("k1", "k2", "f1")
