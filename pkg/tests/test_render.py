"""Text, LaTeX and JSON renderings."""

import json
import os
from importlib.resources import files

import jsonschema
import pytest

from daekit import corpus_path
from daekit.governing import govern
from daekit.numcheck import check_solution
from daekit.operators import OperatorPoly
from daekit.render import load_json_system, render
from daekit.roots import characteristic_roots
from daekit.solver import solve
from daekit.system import operator_det
from strategies import corpus

CORPUS = sorted(f for f in os.listdir(corpus_path()) if f.endswith(".dae"))
SCHEMA = json.loads(files("daekit").joinpath("schema/system.schema.json").read_text())


def test_zero_operator():
    assert render(OperatorPoly(0)) == "0"


def test_generic_latex_grouping():
    s = corpus("generic_2x2.dae")
    out = render(govern(s, "x2"), "latex", opaque=s.opaque)
    assert "P_{11}(D) P_{22}(D) - P_{21}(D) P_{12}(D)" in out
    assert "\\mathcal{Q}_{1}(D) = -P_{21}(D)" in out
    assert "\\mathcal{Q}_{2}(D) = P_{11}(D)" in out


def test_governing_text():
    g = govern(corpus("generic_2x2.dae"), "x2")
    assert render(g) == "(P11*P22 - P12*P21)*x2 = (-P21)*f1(t) + P11*f2(t)\n"


def test_solution_text():
    s = corpus("exp_forcing.dae")
    assert render(solve(s)) == "x(t) = (-7/130+9/130i)*exp((3i)*t) + C_1*exp(t) + C_2*exp(2*t)\n"


def test_deterministic():
    s = corpus("massspring_damped.dae")
    assert render(solve(s), "json") == render(solve(s), "json")


@pytest.mark.parametrize("name", CORPUS)
def test_json_round_trip_and_schema(name):
    s = corpus(name)
    doc = render(s, "json")
    jsonschema.validate(json.loads(doc), SCHEMA)
    again = load_json_system(doc).system
    assert again == s
    assert again.row_notes == s.row_notes


def test_json_governing():
    d = json.loads(render(govern(corpus("auditory.dae"), "Vbm", monic=True), "json"))
    assert d["daekit_schema"] == 1 and d["kind"] == "governing"
    assert d["lhs"] == "D_x^2 + Z/Zf"


def test_roots_render():
    s = corpus("repeated_root.dae")
    out = render((operator_det(s), characteristic_roots(s)))
    assert "root -1 multiplicity 2 (exact)" in out
    tex = render((operator_det(s), characteristic_roots(s)), "latex")
    assert "\\det M(a) = a^{3} + 2 a^{2} + a" in tex


def test_report_render():
    s = corpus("exp_forcing.dae")
    assert render(check_solution(s, solve(s))).startswith("PASS")


def test_latex_solution():
    tex = render(solve(corpus("repeated_root.dae")), "latex")
    assert "e^{-t}" in tex and "C_{2}" in tex


def test_malformed_json():
    from daekit.errors import ParseError

    with pytest.raises(ParseError):
        load_json_system("{not json")
    with pytest.raises(ParseError):
        load_json_system(json.dumps({"daekit_schema": 2}))


def test_unknown_format():
    with pytest.raises(ValueError):
        render(OperatorPoly(0), "html")
