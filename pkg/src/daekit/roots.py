"""Roots of univariate characteristic polynomials.

Coefficient lists are ascending (``c[k]`` multiplies ``a**k``).  Exact
Gaussian-rational input goes through a square-free decomposition first,
so multiplicities are exact; each square-free factor is then solved
exactly where possible (degree 1, degree 2 with a square discriminant,
and Durand-Kerner roots that snap to a verified Gaussian rational).
The remaining roots, and all roots of floating input, are numeric.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import NonConvergence, SymbolicCoefficientsRemain
from .scalar import ONE, ZERO, GaussQ, is_exact, num

RESIDUAL_TOL = 1e-12
CLUSTER_TOL = 1e-8
MAX_ITER = 10_000
SNAP_DENOMINATOR = 10**6


@dataclass
class Root:
    value: object
    multiplicity: int = 1

    @property
    def exact(self):
        return isinstance(self.value, GaussQ)

    def __complex__(self):
        return complex(self.value)


@dataclass
class RootSet:
    roots: list
    leading: object = ONE
    source_poly: object = None
    coeffs: list = field(default_factory=list)

    @property
    def degree(self):
        return sum(r.multiplicity for r in self.roots)

    @property
    def exact(self):
        return all(r.exact for r in self.roots)

    def values(self):
        return [r.value for r in self.roots]

    def is_simple(self):
        return all(r.multiplicity == 1 for r in self.roots)

    def chain(self):
        """Roots repeated by multiplicity, in a fixed order."""
        out = []
        for r in self.roots:
            out.extend([r.value] * r.multiplicity)
        return out

    def __iter__(self):
        return iter(self.roots)

    def __len__(self):
        return len(self.roots)


# -- dense univariate arithmetic over Q(i) --------------------------------

def _trim(c):
    c = list(c)
    while c and not c[-1]:
        c.pop()
    return c


def _monic(c):
    lc = c[-1]
    return [x / lc for x in c]


def _deriv(c):
    return [c[k] * k for k in range(1, len(c))]


def _divmod(a, b):
    a = list(a)
    q = [ZERO] * max(len(a) - len(b) + 1, 1)
    lb = b[-1]
    for k in range(len(a) - len(b), -1, -1):
        t = a[k + len(b) - 1] / lb
        q[k] = t
        if t:
            for j, bj in enumerate(b):
                a[k + j] = a[k + j] - t * bj
    return _trim(q), _trim(a[:len(b) - 1])


def _gcd(a, b):
    a, b = _trim(a), _trim(b)
    while b:
        _, r = _divmod(a, b)
        a, b = b, r
    return _monic(a) if a else a


def squarefree(c):
    """Yun's algorithm: list of (monic square-free factor, multiplicity)."""
    c = _monic(_trim(c))
    out = []
    if len(c) <= 1:
        return out
    d = _deriv(c)
    a = _gcd(c, d)
    b, _ = _divmod(c, a)
    cc, _ = _divmod(d, a)
    db = _deriv(b)
    e = _trim([x - y for x, y in _zip_pad(cc, db)])
    k = 1
    while len(b) > 1:
        g = _gcd(b, e) if e else b
        if len(g) > 1:
            out.append((g, k))
        b, _ = _divmod(b, g)
        cc, _ = _divmod(e, g) if e else ([], [])
        db = _deriv(b)
        e = _trim([x - y for x, y in _zip_pad(cc, db)])
        k += 1
    return out


def _zip_pad(a, b):
    n = max(len(a), len(b))
    a = list(a) + [ZERO] * (n - len(a))
    b = list(b) + [ZERO] * (n - len(b))
    return zip(a, b)


def _horner(c, x):
    acc = ZERO if isinstance(x, GaussQ) else 0j
    for a in reversed(c):
        acc = acc * x + a
    return acc


# -- numeric iteration ------------------------------------------------------

def _as_complex_array(c):
    return np.array([complex(x) for x in c], dtype=complex)


def durand_kerner(c, tol=RESIDUAL_TOL, max_iter=MAX_ITER):
    """All roots of the polynomial with ascending coefficients ``c``.

    Iterates until every relative residual ``|p(z)| / sum |c_k||z|^k``
    is at most ``tol``.  Raises NonConvergence after ``max_iter`` sweeps.
    """
    a = _as_complex_array(_trim(c))
    n = len(a) - 1
    if n < 1:
        return np.array([], dtype=complex)
    a = a / a[-1]
    if n == 1:
        return np.array([-a[0]])
    desc = a[::-1]
    absdesc = np.abs(desc)
    radius = 1 + np.max(np.abs(a[:-1]))
    z = radius * 0.5 * (0.4 + 0.9j) ** np.arange(n)
    for _ in range(max_iter):
        pz = np.polyval(desc, z)
        scale = np.polyval(absdesc, np.abs(z))
        if np.all(np.abs(pz) <= tol * scale):
            return z
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1)
        denom = np.prod(diff, axis=1)
        denom[denom == 0] = 1e-300
        step = pz / denom
        z = z - step
        if np.all(np.abs(step) <= 1e-17 * np.maximum(np.abs(z), 1)):
            pz = np.polyval(desc, z)
            scale = np.polyval(absdesc, np.abs(z))
            if np.all(np.abs(pz) <= 1e3 * tol * scale):
                return z
    raise NonConvergence(f"Durand-Kerner did not converge in {max_iter} iterations")


def _relative_residual(c, z, k=0):
    """|p^(k)(z)| relative to the magnitude of its terms."""
    for _ in range(k):
        c = _deriv(c)
    a = _as_complex_array(c)
    if len(a) == 0:
        return 0.0
    v = np.polyval(a[::-1], z)
    s = np.polyval(np.abs(a[::-1]), abs(z))
    return abs(v) / max(s, 1e-300)


def _cluster(c, zs, tol):
    """Group numeric roots into (value, multiplicity).

    Approximations of a k-fold root scatter on a circle of radius about
    eps**(1/k) while their mean stays accurate, so for each root the k
    nearest neighbours within a loose radius are replaced by their
    centroid and accepted when the first k-1 derivatives also vanish
    there.  Roots closer than ``tol`` are merged unconditionally.
    """
    zs = [complex(z) for z in zs]
    free = set(range(len(zs)))
    out = []
    order = sorted(range(len(zs)), key=lambda i: (zs[i].real, zs[i].imag))
    for i in order:
        if i not in free:
            continue
        loose = 1e-2 * max(1.0, abs(zs[i]))
        near = sorted((j for j in free if abs(zs[j] - zs[i]) <= loose),
                      key=lambda j: abs(zs[j] - zs[i]))
        chosen = [i]
        for k in range(len(near), 1, -1):
            group = near[:k]
            centre = complex(np.mean([zs[j] for j in group]))
            if all(_relative_residual(c, centre, d) <= 1e-7 for d in range(k)):
                chosen = group
                break
        else:
            chosen = [j for j in near if abs(zs[j] - zs[i]) <= tol * max(1.0, abs(zs[i]))]
        centre = complex(np.mean([zs[j] for j in chosen]))
        free -= set(chosen)
        out.append(Root(_clean(centre), len(chosen)))
    return out


def _clean(z):
    re, im = z.real, z.imag
    s = max(abs(z), 1.0)
    if abs(im) <= 1e-14 * s:
        im = 0.0
    if abs(re) <= 1e-14 * s:
        re = 0.0
    return complex(re, im)


def _snap(z):
    re = Fraction(z.real).limit_denominator(SNAP_DENOMINATOR)
    im = Fraction(z.imag).limit_denominator(SNAP_DENOMINATOR)
    return GaussQ(re, im)


def _exact_squarefree_roots(g):
    """Roots of a monic square-free exact factor; exact where verifiable."""
    exact, rest = [], list(g)
    while len(rest) > 1:
        if len(rest) == 2:
            exact.append(-rest[0] / rest[1])
            return exact, []
        if len(rest) == 3:
            a, b, cc = rest[2], rest[1], rest[0]
            sq = (b * b - a * cc * 4).sqrt_exact()
            if sq is not None:
                exact.extend([(-b + sq) / (a * 2), (-b - sq) / (a * 2)])
                return exact, []
        found = None
        for z in durand_kerner(rest):
            cand = _snap(complex(z))
            if not _horner(rest, cand):
                found = cand
                break
        if found is None:
            break
        exact.append(found)
        rest, _ = _divmod(rest, [-found, ONE])
    numeric = []
    if len(rest) > 1:
        numeric = [complex(z) for z in durand_kerner(rest)]
    return exact, numeric


def _root_sort_key(r):
    z = complex(r.value)
    return (round(z.real, 12), round(z.imag, 12), r.multiplicity)


def find_roots(coeffs, cluster_tol=CLUSTER_TOL):
    """RootSet of a univariate polynomial given ascending coefficients."""
    c = _trim([num(x) for x in coeffs])
    if not c:
        raise ValueError("zero polynomial has no finite root set")
    lc = c[-1]
    roots = []
    # roots at zero first, since they are exact for any coefficient type
    k = 0
    while k < len(c) - 1 and not c[k]:
        k += 1
    if k:
        roots.append(Root(ZERO, k))
    c0 = c[k:]
    if all(is_exact(x) for x in c0):
        for g, m in squarefree(c0):
            ex, nu = _exact_squarefree_roots(g)
            roots.extend(Root(r, m) for r in ex)
            roots.extend(Root(_clean(z), m) for z in nu)
    elif len(c0) > 1:
        zs = durand_kerner(c0)
        roots.extend(_cluster(c0, zs, cluster_tol))
    roots.sort(key=_root_sort_key)
    return RootSet(roots, lc, None, c)


def roots_of_operator(p, cluster_tol=CLUSTER_TOL):
    """RootSet of a univariate numeric OperatorPoly."""
    if p.params():
        raise SymbolicCoefficientsRemain(
            f"characteristic polynomial still depends on {sorted(map(str, p.params()))}")
    cs = p.univariate_coeffs()
    vals = []
    for rf in cs:
        if not rf.is_const():
            raise SymbolicCoefficientsRemain("non-numeric characteristic coefficient")
        vals.append(rf.num.const_value() if not rf.num.is_zero() else ZERO)
    rs = find_roots(vals, cluster_tol)
    rs.source_poly = p
    return rs


def characteristic_roots(s, numeric_assignment=None, cluster_tol=CLUSTER_TOL):
    """Roots of ``det M(a) = 0`` for a constant-coefficient ODE system."""
    from .system import operator_det, validate_system

    if numeric_assignment:
        s = s.subs(numeric_assignment)
    kind = validate_system(s)
    if kind.is_pde or kind.is_vc:
        raise SymbolicCoefficientsRemain(
            f"characteristic roots need a constant-coefficient ODE system, got {kind.tag}")
    return roots_of_operator(operator_det(s), cluster_tol)


def verify_roots(rs, tol=1e-8):
    """True when each numeric root satisfies ``|P(r)| <= tol * ||P||``."""
    c = rs.coeffs
    for r in rs.roots:
        if r.exact:
            if _horner(c, r.value):
                return False
        elif _relative_residual(c, complex(r.value)) > tol:
            return False
    return True
