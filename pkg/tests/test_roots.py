"""Characteristic roots: exact square-free path and Durand-Kerner with clustering."""

import numpy as np
import pytest

from daekit.errors import NonConvergence, SymbolicCoefficientsRemain
from daekit.roots import characteristic_roots, durand_kerner, find_roots, squarefree, verify_roots
from daekit.scalar import GaussQ
from strategies import corpus


def companion_roots(c):
    c = np.asarray(c, dtype=complex)
    c = c / c[-1]
    n = len(c) - 1
    M = np.zeros((n, n), dtype=complex)
    M[1:, :-1] = np.eye(n - 1)
    M[:, -1] = -c[:-1]
    return np.linalg.eigvals(M)


def match(found, want, tol):
    want = list(want)
    for z in found:
        k = int(np.argmin([abs(z - w) for w in want]))
        assert abs(z - want[k]) <= tol * max(1.0, abs(want[k]))
        want.pop(k)
    assert not want


def test_exact_simple():
    rs = find_roots([2, -3, 1])
    assert rs.exact and rs.values() == [GaussQ(1), GaussQ(2)]


def test_exact_multiplicity():
    # t^3 + 2t^2 + t = t (t+1)^2
    rs = find_roots([0, 1, 2, 1])
    assert [(r.value, r.multiplicity) for r in rs] == [(GaussQ(-1), 2), (GaussQ(0), 1)]


def test_gaussian_roots():
    rs = find_roots([4, 0, 1])
    assert {r.value for r in rs} == {GaussQ(0, 2), GaussQ(0, -2)}


def test_irrational_roots_numeric():
    rs = find_roots([-2, 0, 1])
    assert not rs.exact
    assert sorted(complex(v).real for v in rs.values()) == pytest.approx([-2 ** 0.5, 2 ** 0.5])
    assert verify_roots(rs)


def test_squarefree_parts():
    # (a-1)^3 (a+2)
    c = np.polynomial.polynomial.polyfromroots([1, 1, 1, -2]).real
    parts = squarefree([GaussQ(int(round(x))) for x in c])
    assert [m for _, m in parts] == [1, 3]


def test_against_companion_random():
    rng = np.random.default_rng(42)
    for _ in range(30):
        deg = int(rng.integers(1, 9))
        c = list(rng.uniform(-10, 10, deg)) + [1.0]
        rs = find_roots(c)
        match(rs.chain(), companion_roots(c), 1e-8)


def test_float_repeated_root_clusters():
    rng = np.random.default_rng(3)
    for _ in range(20):
        r = complex(*rng.uniform(-3, 3, 2))
        s = float(rng.uniform(-3, 3))
        c = np.polynomial.polynomial.polyfromroots([r, r, r, s, s])
        rs = find_roots(list(c))
        mults = sorted(x.multiplicity for x in rs)
        assert mults == [2, 3]


def test_durand_kerner_failure_is_reported():
    with pytest.raises(NonConvergence):
        durand_kerner([1, 0, 0, 0, 0, 0, 1], max_iter=2)


def test_characteristic_roots_of_system():
    rs = characteristic_roots(corpus("massspring.dae"), {"m1": 1, "m2": 1, "k1": 1, "k2": 1})
    mags = sorted(abs(complex(v)) for v in rs.values())
    golden = (1 + 5 ** 0.5) / 2
    assert mags == pytest.approx([1 / golden, 1 / golden, golden, golden])


def test_symbolic_roots_refused():
    with pytest.raises(SymbolicCoefficientsRemain):
        characteristic_roots(corpus("massspring.dae"))
