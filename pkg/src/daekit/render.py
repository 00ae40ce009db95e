"""Text, LaTeX and JSON renderings of systems, governing equations and solutions.

The text form of a :class:`DaeSystem` is valid ``.dae`` source, so
``parse_system(render(s, "text"))`` rebuilds an equal system.  JSON
carries ``"daekit_schema": 1``.
"""

from __future__ import annotations

import json
import re

from .expfunc import ConstSymbol, _is_zero_exp
from .governing import GoverningEquation
from .numcheck import ResidualReport
from .operators import (
    FuncSymbol,
    OperatorPoly,
    VcOperator,
    format_operator,
    format_vc,
    is_op_symbol,
    op_ivar,
)
from .roots import RootSet
from .scalar import GaussQ, Poly, format_scalar, sym_key
from .system import DaeSystem, ForcingSymbol

SCHEMA_VERSION = 1
GREEK = {"alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta", "kappa",
         "lambda", "mu", "nu", "xi", "pi", "rho", "sigma", "tau", "phi", "chi", "psi",
         "omega"}


# -- plain text -----------------------------------------------------------------------

def _paren(s):
    return s if re.fullmatch(r"[\w']+", s) else f"({s})"


def forcing_text(f):
    return str(f)


def entry_text(e):
    return format_vc(e) if isinstance(e, VcOperator) else format_operator(e)


def system_text(s):
    lines = [f"ivars: {', '.join(s.ivars)};", f"vars: {', '.join(s.dvars)};"]
    plain = [p for p in s.params if p not in s.opaque]
    if plain:
        lines.append(f"params: {', '.join(plain)};")
    if s.opaque:
        lines.append(f"opaque: {', '.join(s.opaque)};")
    if getattr(s, "funcs", ()):
        lines.append("funcs: " + ", ".join(f"{n}({','.join(a)})" for n, a in s.funcs) + ";")
    notes = dict(s.row_notes)
    for i, row in enumerate(s.matrix):
        if i in notes:
            how = ", ".join(f"D_{v}^{k}" if k > 1 else f"D_{v}" for v, k in notes[i].items())
            lines.append(f"# row {i + 1} was multiplied by {how} to remove int(...)")
        terms = []
        for d, e in zip(s.dvars, row):
            if e.is_zero():
                continue
            terms.append(f"{_paren(entry_text(e))}*{d}")
        lines.append(f"eq: {' + '.join(terms)} = {forcing_text(s.forcing[i])};")
    return "\n".join(lines) + "\n"


def _rhs_term(q, f):
    ft = forcing_text(f)
    qt = entry_text(q)
    if qt == "1":
        return ft
    if not isinstance(f, ForcingSymbol) and q.degree() == 0 and not q.params():
        # numeric constant factor: fold it into the forcing
        return forcing_text(f.scale(q.rf.num.const_value()))
    if isinstance(f, ForcingSymbol) or re.fullmatch(r"[\w']+", ft):
        return f"{_paren(qt)}*{ft}"
    return f"{_paren(qt)}*({ft})"


def governing_text(g):
    lhs = entry_text(g.lhs)
    rhs = " + ".join(_rhs_term(q, f) for _, q, f in g.rhs) or "0"
    return f"{_paren(lhs)}*{g.target} = {rhs}\n"


def solution_text(sol):
    lines = []
    for dv, x in sol.items():
        args = ",".join(x.ivars)
        lines.append(f"{dv}({args}) = {x}")
    return "\n".join(lines) + "\n"


def roots_text(det, rs):
    lines = [f"det M(a) = {format_operator(det)}"]
    for r in rs.roots:
        kind = "exact" if r.exact else "numeric"
        v = str(r.value) if r.exact else format_scalar(complex(r.value))
        lines.append(f"root {v} multiplicity {r.multiplicity} ({kind})")
    return "\n".join(lines) + "\n"


def report_text(rep):
    status = "PASS" if rep.passed else "FAIL"
    rows = ", ".join(f"{m:.3e}" for m in rep.row_max)
    return (f"{status}: max residual {rep.max_residual:.3e} (tol {rep.tol:g}) "
            f"on {rep.grid.ivar} in [{rep.grid.start:g}, {rep.grid.stop:g}] x {rep.grid.points}; "
            f"rows [{rows}]\n")


# -- LaTeX ------------------------------------------------------------------------------

def latex_name(name, opaque=(), single_ivar=None):
    if isinstance(name, FuncSymbol):
        return (latex_name(name.name) + "'" * name.order
                + "(" + ",".join(latex_name(a) for a in name.args) + ")")
    if isinstance(name, ConstSymbol):
        base, _, idx = name.name.partition("_")
        return f"{base}_{{{idx}}}" if idx else base
    if is_op_symbol(name):
        v = op_ivar(name)
        return "D" if single_ivar else f"D_{{{latex_name(v)}}}"
    arg = "(D)" if single_ivar else ""
    if name in opaque:
        m = re.fullmatch(r"([A-Za-z]+)(\d+)", name)
        if m:
            return f"{m.group(1)}_{{{m.group(2)}}}{arg}"
        return f"{name}{arg}"
    if name in GREEK:
        return "\\" + name
    if "_" in name:
        base, rest = name.split("_", 1)
        return f"{latex_name(base)}_{{{rest}}}"
    m = re.fullmatch(r"([A-Za-z]+?)(\d+)", name)
    if m:
        return f"{latex_name(m.group(1))}_{{{m.group(2)}}}"
    return name


def latex_scalar(c):
    if isinstance(c, GaussQ):
        def frac(q):
            if q.denominator == 1:
                return str(q.numerator)
            sign = "-" if q < 0 else ""
            return f"{sign}\\frac{{{abs(q.numerator)}}}{{{q.denominator}}}"
        if not c.im:
            return frac(c.re)
        im = "i" if c.im == 1 else ("-i" if c.im == -1 else f"{frac(c.im)} i")
        if not c.re:
            return im
        sign = "+" if c.im > 0 else "-"
        im_abs = "i" if abs(c.im) == 1 else f"{frac(abs(c.im))} i"
        return f"\\left({frac(c.re)} {sign} {im_abs}\\right)"
    z = complex(c)
    if z.imag == 0:
        return f"{z.real:.12g}"
    return f"\\left({z.real:.12g} {'+' if z.imag >= 0 else '-'} {abs(z.imag):.12g} i\\right)"


def _opaque_key(opaque):
    def key(item):
        s = item[0]
        if isinstance(s, str) and s in opaque:
            m = re.fullmatch(r"[A-Za-z]+(\d)(\d)", s)
            if m:
                return (0, int(m.group(2)), int(m.group(1)))
        return (1, sym_key(s))
    return key


def latex_poly(p, ctx):
    if p.is_zero():
        return "0"
    parts = []
    terms = p.sorted_terms()
    for m, c in terms:
        neg = False
        if isinstance(c, GaussQ) and not c.im and c.re < 0:
            neg, c = True, -c
        elif isinstance(c, complex) and c.imag == 0 and c.real < 0:
            neg, c = True, -c
        factors = []
        for s, e in sorted(m, key=_opaque_key(ctx["opaque"])):
            nm = latex_name(s, ctx["opaque"], ctx["single"])
            factors.append(nm if e == 1 else f"{{{nm}}}^{{{e}}}")
        if c == 1 and factors:
            body = " ".join(factors)
        else:
            body = " ".join([latex_scalar(c)] + factors)
        parts.append(("-" if neg else "+", body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def latex_ratfunc(r, ctx):
    n = latex_poly(r.num, ctx)
    if not r.den:
        return n
    d = " ".join(_lparen(latex_poly(f, ctx), len(f.terms) > 1) for f in r.den)
    return f"\\frac{{{n}}}{{{d}}}"


def _lparen(s, need=True):
    return f"\\left({s}\\right)" if need else s


def latex_operator(p, ctx):
    if isinstance(p, VcOperator):
        items = [(c, {p.opvar: k} if k else {}) for c, k in p.terms()]
    else:
        ts = p.terms()
        key = Poly()._order_key(set(p.opvars))
        items = [(ts[m], dict(m)) for m in sorted(ts, key=key, reverse=True)]
    if not items:
        return "0"
    parts = []
    for c, mono in items:
        ops = " ".join(latex_name(s, (), ctx["single"]) + (f"^{{{e}}}" if e > 1 else "")
                       for s, e in sorted(mono.items()))
        cs = latex_ratfunc(c, ctx)
        neg = False
        if cs.startswith("-") and len(c.num.terms) == 1:
            neg, cs = True, latex_ratfunc(-c, ctx)
        if ops:
            if cs == "1":
                body = ops
            elif len(c.num.terms) > 1 and not c.den:
                body = f"\\left({cs}\\right) {ops}"
            else:
                body = f"{cs} {ops}"
        else:
            body = cs
        parts.append(("-" if neg else "+", body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def latex_exppoly(f, ctx):
    if f.is_zero():
        return "0"
    parts = []
    for (pw, ex), c in f.sorted_terms():
        factors = []
        for v, k in zip(f.ivars, pw):
            if k:
                factors.append(latex_name(v) if k == 1 else f"{latex_name(v)}^{{{k}}}")
        lin = []
        for v, a in zip(f.ivars, ex):
            if not _is_zero_exp(a):
                if a == 1:
                    lin.append(latex_name(v))
                elif a == -1:
                    lin.append("-" + latex_name(v))
                else:
                    lin.append(f"{latex_scalar(a)} {latex_name(v)}")
        if lin:
            factors.append("e^{" + " + ".join(lin).replace("+ -", "- ") + "}")
        cs = latex_poly(c, ctx)
        if len(c.terms) > 1:
            cs = f"\\left({cs}\\right)"
        if factors:
            body = " ".join(factors) if cs == "1" else (
                "-" + " ".join(factors) if cs == "-1" else " ".join([cs] + factors))
        else:
            body = cs
        parts.append(body)
    out = parts[0]
    for p in parts[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


def _ctx(s=None, ivars=None, opaque=()):
    ivars = ivars if ivars is not None else (s.ivars if s is not None else ("t",))
    return {"opaque": tuple(opaque or (s.opaque if s is not None else ())),
            "single": len(ivars) == 1}


def latex_forcing(f, ctx):
    if isinstance(f, ForcingSymbol):
        return f"{latex_name(f.name)}({','.join(latex_name(a) for a in f.args)})"
    return latex_exppoly(f, ctx)


def system_latex(s):
    ctx = _ctx(s)
    rows = [" & ".join(latex_operator(e, ctx) if not e.is_zero() else "" for e in row)
            for row in s.matrix]
    mat = " \\\\\n".join(rows)
    args = ",".join(latex_name(v) for v in s.ivars)
    xs = " \\\\ ".join(f"{latex_name(d)}({args})" for d in s.dvars)
    fs = " \\\\ ".join(latex_forcing(f, ctx) for f in s.forcing)
    return ("\\begin{bmatrix}\n" + mat + "\n\\end{bmatrix}\n"
            f"\\begin{{bmatrix}} {xs} \\end{{bmatrix}} = "
            f"\\begin{{bmatrix}} {fs} \\end{{bmatrix}}\n")


def governing_latex(g, opaque=()):
    ctx = {"opaque": tuple(opaque), "single": len(g.ivars) == 1}
    dsym = "D" if ctx["single"] else "\\mathbf{D}"
    lhs = latex_operator(g.lhs, ctx)
    lines = [f"\\mathcal{{P}}({dsym}) = {lhs}"]
    rhs_parts = []
    for j, q, f in g.rhs:
        lines.append(f"\\mathcal{{Q}}_{{{j + 1}}}({dsym}) = {latex_operator(q, ctx)}")
        rhs_parts.append(f"\\mathcal{{Q}}_{{{j + 1}}}({dsym})\\, {latex_forcing(f, ctx)}")
    rhs = " + ".join(rhs_parts) or "0"
    lines.append(f"\\mathcal{{P}}({dsym})\\, {latex_name(g.target)} = {rhs}")
    return " \\\\\n".join(lines) + "\n"


def solution_latex(sol):
    lines = []
    for dv, x in sol.items():
        ctx = {"opaque": (), "single": len(x.ivars) == 1}
        args = ",".join(latex_name(v) for v in x.ivars)
        lines.append(f"{latex_name(dv)}({args}) = {latex_exppoly(x, ctx)}")
    return " \\\\\n".join(lines) + "\n"


def roots_latex(det, rs):
    ctx = {"opaque": (), "single": True}
    lines = [f"\\det M(a) = {latex_operator(det, ctx).replace('D', 'a')}"]
    for r in rs.roots:
        lines.append(f"a = {latex_scalar(r.value)}\\quad (\\times {r.multiplicity})")
    return " \\\\\n".join(lines) + "\n"


# -- JSON ---------------------------------------------------------------------------------

def scalar_json(c):
    if isinstance(c, GaussQ):
        return str(c)
    z = complex(c)
    return {"re": z.real, "im": z.imag}


def exppoly_json(f):
    out = []
    for (pw, ex), c in f.sorted_terms():
        out.append({
            "coeff": str(c) if len(c.terms) <= 1 else f"({c})",
            "powers": {v: k for v, k in zip(f.ivars, pw) if k},
            "exponents": {v: scalar_json(a) for v, a in zip(f.ivars, ex) if not _is_zero_exp(a)},
        })
    return out


def forcing_json(f):
    if isinstance(f, ForcingSymbol):
        return {"symbol": f.name, "args": list(f.args)}
    return {"terms": exppoly_json(f)}


def system_json(s):
    return {
        "daekit_schema": SCHEMA_VERSION,
        "kind": "system",
        "ivars": list(s.ivars),
        "vars": list(s.dvars),
        "params": [p for p in s.params if p not in s.opaque],
        "opaque": list(s.opaque),
        "funcs": [{"name": n, "args": list(a)} for n, a in getattr(s, "funcs", ())],
        "equations": [
            {"entries": {d: entry_text(e) for d, e in zip(s.dvars, row) if not e.is_zero()},
             "forcing": forcing_json(f)}
            for row, f in zip(s.matrix, s.forcing)
        ],
        "row_notes": [{"row": i + 1, "multiplied_by": {v: k for v, k in note.items()}}
                      for i, note in s.row_notes],
    }


def governing_json(g):
    return {
        "daekit_schema": SCHEMA_VERSION,
        "kind": "governing",
        "target": g.target,
        "method": g.method,
        "lhs": entry_text(g.lhs),
        "rhs": [{"row": j + 1, "operator": str(q), "forcing": forcing_json(f)} for j, q, f in g.rhs],
        "trace": g.trace,
    }


def solution_json(sol, mode=None):
    out = {}
    for dv, x in sol.items():
        det = getattr(sol, "details", {}).get(dv)
        out[dv] = {
            "expression": str(x),
            "terms": exppoly_json(x),
            "constants": [str(c) for c in sorted(x.constants(), key=lambda c: c.sort_key)],
        }
        if det is not None and not isinstance(det.roots, list):
            out[dv]["denominator"] = str(det.Q)
    return {"daekit_schema": SCHEMA_VERSION, "kind": "solution", "mode": mode, "solutions": out}


def roots_json(det, rs):
    return {
        "daekit_schema": SCHEMA_VERSION,
        "kind": "charpoly",
        "det": format_operator(det),
        "roots": [{"value": scalar_json(r.value), "multiplicity": r.multiplicity,
                   "exact": r.exact} for r in rs.roots],
    }


def report_json(rep):
    return {"daekit_schema": SCHEMA_VERSION, "kind": "check", **rep.to_dict()}


# -- dispatch ------------------------------------------------------------------------------

def render(obj, fmt="text", **kw):
    """Render a system, governing equation, solution map, report or (det, roots)."""
    if fmt not in ("text", "latex", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    if isinstance(obj, (OperatorPoly, VcOperator)):
        if fmt == "latex":
            return latex_operator(obj, {"opaque": kw.get("opaque", ()),
                                        "single": len(getattr(obj, "opvars", (1,))) <= 1})
        return entry_text(obj)
    if isinstance(obj, DaeSystem):
        if fmt == "text":
            return system_text(obj)
        if fmt == "latex":
            return system_latex(obj)
        return json.dumps(system_json(obj), indent=2) + "\n"
    if isinstance(obj, GoverningEquation):
        if fmt == "text":
            return governing_text(obj)
        if fmt == "latex":
            return governing_latex(obj, kw.get("opaque", ()))
        return json.dumps(governing_json(obj), indent=2) + "\n"
    if isinstance(obj, ResidualReport):
        if fmt == "json":
            return json.dumps(report_json(obj), indent=2) + "\n"
        return report_text(obj)
    if isinstance(obj, tuple) and len(obj) == 2 and isinstance(obj[1], RootSet):
        det, rs = obj
        if fmt == "text":
            return roots_text(det, rs)
        if fmt == "latex":
            return roots_latex(det, rs)
        return json.dumps(roots_json(det, rs), indent=2) + "\n"
    if isinstance(obj, dict):
        if fmt == "text":
            return solution_text(obj)
        if fmt == "latex":
            return solution_latex(obj)
        return json.dumps(solution_json(obj, kw.get("mode")), indent=2) + "\n"
    raise TypeError(f"cannot render {type(obj).__name__}")


# -- loading the JSON form --------------------------------------------------------------------

def _scalar_src(v):
    if isinstance(v, dict):
        return f"({v['re']!r} + {v['im']!r}*i)"
    return f"({v})"


def _forcing_src(fj, ivars):
    if "symbol" in fj:
        return f"{fj['symbol']}({','.join(fj.get('args') or ivars)})"
    parts = []
    for t in fj.get("terms", []):
        piece = [f"({t.get('coeff', '1')})"]
        for v, k in t.get("powers", {}).items():
            piece.append(f"{v}^{int(k)}")
        ex = t.get("exponents", {})
        if ex:
            piece.append("exp(" + " + ".join(f"{_scalar_src(a)}*{v}" for v, a in ex.items()) + ")")
        parts.append("*".join(piece))
    return " + ".join(parts) or "0"


def system_source_from_json(data):
    """``.dae`` source equivalent to a schema-1 JSON document."""
    from .errors import ParseError

    if not isinstance(data, dict) or data.get("daekit_schema") != SCHEMA_VERSION:
        raise ParseError("not a daekit schema 1 document")
    try:
        ivars, dvars = data["ivars"], data["vars"]
        lines = [f"ivars: {', '.join(ivars)};", f"vars: {', '.join(dvars)};"]
        if data.get("params"):
            lines.append(f"params: {', '.join(data['params'])};")
        if data.get("opaque"):
            lines.append(f"opaque: {', '.join(data['opaque'])};")
        if data.get("funcs"):
            lines.append("funcs: " + ", ".join(
                f"{f['name']}({','.join(f['args'])})" for f in data["funcs"]) + ";")
        for eq in data["equations"]:
            terms = [f"({op})*{d}" for d, op in eq["entries"].items()]
            lines.append(f"eq: {' + '.join(terms) or '0'} = "
                         f"{_forcing_src(eq.get('forcing', {'terms': []}), ivars)};")
    except (KeyError, TypeError) as err:
        raise ParseError(f"malformed system document: {err}") from None
    return "\n".join(lines) + "\n"


def load_json_system(text):
    from .dsl import parse_system
    from .errors import ParseError

    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"invalid JSON: {err.msg}", err.lineno, err.colno) from None
    src = parse_system(system_source_from_json(data))
    notes = tuple((n["row"] - 1, dict(n["multiplied_by"])) for n in data.get("row_notes", []))
    if notes:
        from dataclasses import replace
        src.system = replace(src.system, row_notes=notes)
    return src


__all__ = ["render", "system_text", "load_json_system", "latex_operator"]
