"""The .dae language: parsing, diagnostics, fuzzing and round trips."""

import os
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from daekit import corpus_path
from daekit.dsl import parse_system, tokenize
from daekit.errors import ArityError, DaeKitError, ParseError, UndeclaredSymbol
from daekit.expfunc import ExpPoly
from daekit.operators import OperatorPoly
from daekit.render import render
from daekit.scalar import GaussQ, Poly
from daekit.system import ForcingSymbol
from strategies import corpus, exppolys, random_system

CORPUS = sorted(f for f in os.listdir(corpus_path()) if f.endswith(".dae"))
D = OperatorPoly.D("t")


def test_corpus_size():
    assert len(CORPUS) >= 20


def test_first_example_matrix():
    s = corpus("chain3.dae")
    one = OperatorPoly(1, ("D_t",))
    zero = OperatorPoly(0, ("D_t",))
    assert s.matrix == ((D ** 2, -one, zero), (zero, D, -one), (-one, one, D + 1))
    assert [f.name for f in s.forcing] == ["f1", "f2", "f3"]


def test_mass_spring_entries():
    s = corpus("massspring.dae")
    m1, k1 = Poly.symbol("m1"), Poly.symbol("k1")
    assert s.matrix[0][0] == D ** 2 * OperatorPoly(m1) + OperatorPoly(k1)
    assert s.matrix[1][0] == OperatorPoly(-k1)
    assert s.forcing[0] == ExpPoly.const(("t",), Poly.symbol("f1"))


def test_implicit_d_subscript_for_single_ivar():
    a = parse_system("ivars: t; vars: x; eq: D^2 x = 0;").system
    b = parse_system("ivars: t; vars: x; eq: D_t^2 x = 0;").system
    assert a == b


def test_exp_forcing_and_imaginary_unit():
    s = parse_system("ivars: t; vars: x; eq: D x = 2*t*exp((1+2*i)*t) - 7;").system
    want = ExpPoly.monomial(("t",), 2, {"t": 1}, {"t": GaussQ(1, 2)}) + ExpPoly.const(("t",), -7)
    assert s.forcing[0] == want


def test_int_row_premultiplies():
    s = corpus("pde_tl.dae")
    assert s.row_notes == ((0, {"t": 1}),)
    ov = ("D_t", "D_x")
    assert s.matrix[0][1] == OperatorPoly(OperatorPoly.D("t"), ov)


def test_opaque_forcing_symbol():
    s = corpus("tl_vc.dae")
    assert s.forcing[0] == ForcingSymbol("f1", ("x", "w"))


def test_empty_equation_list():
    with pytest.raises(ArityError):
        parse_system("ivars: t; vars: x;")


def test_too_many_rows():
    with pytest.raises(ArityError):
        parse_system("ivars: t; vars: x; eq: x = 0; eq: D x = 0;")


def test_undeclared_symbol_located():
    with pytest.raises(UndeclaredSymbol) as err:
        parse_system("ivars: t;\nvars: x;\neq: D x + q*x = 0;")
    assert err.value.line == 3 and err.value.column is not None


def test_variable_not_rightmost():
    with pytest.raises(ParseError):
        parse_system("ivars: t; vars: x; eq: x D = 0;")


def test_syntax_error_position():
    with pytest.raises(ParseError) as err:
        parse_system("ivars: t; vars: x;\neq: D x + = 0;")
    assert err.value.line == 2
    assert str(err.value).startswith("line 2, column")


def test_bad_character():
    src = "ivars: t; vars: x; eq: x = 0 $;"
    with pytest.raises(ParseError) as err:
        parse_system(src)
    assert err.value.column == src.index("$") + 1


def test_missing_header():
    with pytest.raises(ParseError):
        parse_system("vars: x; eq: x = 0;")


@pytest.mark.parametrize("name", CORPUS)
def test_corpus_round_trip(name):
    s = corpus(name)
    again = parse_system(render(s, "text")).system
    assert again == s


@pytest.mark.parametrize("name", CORPUS)
def test_spans_cover_entries(name):
    from daekit.dsl import parse_file

    src = parse_file(corpus_path(name))
    s = src.system
    assert set(src.spans) == {(i, d) for i in range(s.n) for d in s.dvars}
    assert len(src.equation_spans) == s.n


@settings(max_examples=40)
@given(st.integers(0, 10 ** 6), st.integers(1, 3), st.data())
def test_random_round_trip(seed, n, data):
    rng = random.Random(seed)
    s = random_system(rng, n)
    s = s.with_forcing([data.draw(exppolys()) if rng.random() < 0.7 else f for f in s.forcing])
    assert parse_system(render(s, "text")).system == s


VOCAB = ["D", "D_t", "x", "y", "t", "int", "exp", "(", ")", "+", "-", "*", "/", "^", "=", ";",
         ",", ":", "eq", "0", "1", "2.5", "i", "f1", "vars", "ivars", "params", "'"]


def mutate(tokens, rng):
    toks = list(tokens)
    for _ in range(rng.randint(1, 4)):
        k = rng.randrange(len(toks))
        op = rng.random()
        if op < 0.3:
            del toks[k]
        elif op < 0.6:
            toks.insert(k, rng.choice(VOCAB))
        elif op < 0.8:
            toks[k] = rng.choice(VOCAB)
        else:
            j = rng.randrange(len(toks))
            toks[k], toks[j] = toks[j], toks[k]
        if not toks:
            toks = [";"]
    return toks


def test_fuzzed_sources_fail_gracefully():
    rng = random.Random(2024)
    sources = [open(corpus_path(n)).read() for n in CORPUS]
    for _ in range(1500):
        text = rng.choice(sources)
        toks = [t.text for t in tokenize(text) if t.kind != "eof"]
        bad = " ".join(mutate(toks, rng))
        try:
            parse_system(bad)
        except DaeKitError:
            pass
