"""Parser for the ``.dae`` equation language.

A file declares its symbols and then lists one equation per row::

    # mass-spring pair
    ivars: t;
    vars: x1, x2;
    params: m1, m2, k1, k2, f1;
    eq: m1*D^2 x1 + k1*x1 - k1*x2 = f1;
    eq: -k1*x1 + (m2*D^2 + k1 + k2) x2 = 0;

Headers: ``ivars:``, ``vars:``, ``params:``, ``opaque:`` (parameters
standing for generic operator polynomials) and ``funcs:`` (formal
coefficient functions such as ``Y(x,w)``).  ``#`` starts a comment.
Juxtaposition multiplies; the dependent variable must be the rightmost
factor of its term.  ``int(term, v)`` marks a term integrated in ``v``;
the whole row is then multiplied by ``D_v``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ArityError, ParseError, UndeclaredSymbol
from .expfunc import ExpPoly
from .operators import FuncSymbol, OperatorPoly, VcOperator, op_symbol
from .scalar import ONE, ZERO, GaussQ, Poly, RatFunc
from .system import DaeSystem, ForcingSymbol

HEADERS = ("ivars", "vars", "params", "opaque", "funcs")

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<num>\d+(?:\.\d+)?(?:[eE][-+]?\d+)?)
  | (?P<name>[A-Za-z][A-Za-z0-9_]*'*)
  | (?P<op>[-+*/^(),=;:])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


@dataclass(frozen=True)
class Span:
    line: int
    col: int
    end_line: int
    end_col: int

    def __str__(self):
        return f"{self.line}:{self.col}-{self.end_line}:{self.end_col}"


def tokenize(text):
    out = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind not in ("ws", "comment"):
                out.append(Token(kind, s, line, col))
            col += len(s)
        pos = m.end()
    out.append(Token("eof", "", line, col))
    return out


# -- syntax tree ------------------------------------------------------------------

@dataclass
class Node:
    kind: str
    value: object = None
    args: list = field(default_factory=list)
    tok: Token = None


class _Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    @property
    def cur(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.cur
        return ParseError(msg, tok.line, tok.col)

    def expect(self, text):
        t = self.cur
        if t.text != text:
            found = t.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.next()

    def accept(self, text):
        if self.cur.text == text:
            return self.next()
        return None

    # expr := ['+'|'-'] term {('+'|'-') term}
    def expr(self):
        start = self.cur
        if self.cur.text in ("+", "-"):
            op = self.next().text
            node = self.term()
            if op == "-":
                node = Node("neg", args=[node], tok=start)
        else:
            node = self.term()
        while self.cur.text in ("+", "-"):
            t = self.next()
            rhs = self.term()
            node = Node("add" if t.text == "+" else "sub", args=[node, rhs], tok=t)
        return node

    def _starts_factor(self):
        t = self.cur
        return t.kind in ("num", "name") or t.text == "("

    # term := factor {['*'|'/'] factor}
    def term(self):
        node = self.unary()
        while True:
            t = self.cur
            if t.text in ("*", "/"):
                self.next()
                rhs = self.unary()
                node = Node("mul" if t.text == "*" else "div", args=[node, rhs], tok=t)
            elif self._starts_factor():
                rhs = self.unary()
                node = Node("mul", args=[node, rhs], tok=t)
            else:
                return node

    def unary(self):
        if self.cur.text == "-":
            t = self.next()
            return Node("neg", args=[self.unary()], tok=t)
        return self.power()

    def power(self):
        base = self.atom()
        if self.cur.text == "^":
            t = self.next()
            neg = bool(self.accept("-"))
            e = self.cur
            if e.kind != "num" or not e.text.isdigit():
                raise self.error("exponent must be a non-negative integer literal")
            self.next()
            k = int(e.text)
            return Node("pow", -k if neg else k, [base], t)
        return base

    def atom(self):
        t = self.cur
        if t.kind == "num":
            self.next()
            return Node("num", _parse_number(t.text), tok=t)
        if t.kind == "name":
            self.next()
            if self.cur.text == "(":
                self.next()
                args = []
                if self.cur.text != ")":
                    args.append(self.expr())
                    while self.accept(","):
                        args.append(self.expr())
                self.expect(")")
                return Node("call", t.text, args, t)
            return Node("name", t.text, tok=t)
        if t.text == "(":
            self.next()
            node = self.expr()
            self.expect(")")
            return node
        found = t.text or "end of input"
        raise self.error(f"unexpected {found!r}")


def _parse_number(text):
    if re.fullmatch(r"\d+", text):
        return GaussQ(int(text))
    return GaussQ(Fraction(text))


# -- evaluation of the left-hand side -------------------------------------------------

class _Scope:
    def __init__(self, ivars, dvars, params, opaque, funcs):
        self.ivars = list(ivars)
        self.dvars = list(dvars)
        self.params = list(params)
        self.opaque = list(opaque)
        self.funcs = dict(funcs)
        self.opvars = tuple(op_symbol(v) for v in self.ivars)

    def declared(self, name):
        return (name in self.ivars or name in self.dvars or name in self.params
                or name in self.opaque or name in self.funcs)


def _err(node, msg, cls=ParseError):
    t = node.tok
    return cls(msg, t.line if t else None, t.col if t else None)


def _is_vc(x):
    return isinstance(x, VcOperator)


def _scalar_mul(a, b):
    if _is_vc(a) or _is_vc(b):
        if _is_vc(a):
            return a * b
        return b.__rmul__(a)
    return a * b


def _scalar_add(a, b, sign=1):
    if _is_vc(a) or _is_vc(b):
        iv = a.ivar if _is_vc(a) else b.ivar
        a = a if _is_vc(a) else VcOperator.from_operator(a, iv)
        b = b if _is_vc(b) else VcOperator.from_operator(b, iv)
        return a + b if sign > 0 else a - b
    return a + b if sign > 0 else a - b


def _order0_coeff(x, node):
    if _is_vc(x):
        if x.degree() > 0:
            raise _err(node, "cannot divide by an operator")
        return x.coeffs.get(0, RatFunc.coerce(0))
    if x.degree() > 0:
        raise _err(node, "cannot divide by an operator")
    return x.rf


class _LhsEval:
    def __init__(self, scope):
        self.sc = scope

    def op(self, value):
        return OperatorPoly(value, self.sc.opvars)

    def eval(self, node):
        """Returns an operator (OperatorPoly/VcOperator) or a list of (dvar, op, ints)."""
        k = node.kind
        sc = self.sc
        if k == "num":
            return self.op(RatFunc.coerce(node.value))
        if k == "name":
            name = node.value
            if name in sc.dvars:
                return [(name, self.op(1), {})]
            if name in sc.params or name in sc.opaque:
                return self.op(Poly.symbol(name))
            d = self._operator_name(name, node)
            if d is not None:
                return d
            if name == "i":
                return self.op(RatFunc.coerce(GaussQ(0, 1)))
            if name in sc.ivars:
                raise _err(node, f"independent variable {name!r} cannot appear as a coefficient")
            raise _err(node, f"undeclared symbol {name!r}", UndeclaredSymbol)
        if k == "call":
            return self._call(node)
        if k == "neg":
            v = self.eval(node.args[0])
            if isinstance(v, list):
                return [(d, -o, n) for d, o, n in v]
            return -v
        if k in ("add", "sub"):
            a, b = self.eval(node.args[0]), self.eval(node.args[1])
            sign = 1 if k == "add" else -1
            if isinstance(a, list) and isinstance(b, list):
                return a + [(d, o if sign > 0 else -o, n) for d, o, n in b]
            if isinstance(a, list) or isinstance(b, list):
                raise _err(node, "every term of a left-hand side must act on a dependent variable")
            return _scalar_add(a, b, sign)
        if k == "mul":
            a, b = self.eval(node.args[0]), self.eval(node.args[1])
            if isinstance(a, list):
                raise _err(node, "the dependent variable must be the rightmost factor of a term")
            if isinstance(b, list):
                return [(d, _scalar_mul(a, o), n) for d, o, n in b]
            return _scalar_mul(a, b)
        if k == "div":
            a, b = self.eval(node.args[0]), self.eval(node.args[1])
            if isinstance(b, list):
                raise _err(node, "cannot divide by a dependent variable")
            c = _order0_coeff(b, node)
            if c.is_zero():
                raise _err(node, "division by zero")
            if isinstance(a, list):
                return [(d, o / c, n) for d, o, n in a]
            return a / c
        if k == "pow":
            a = self.eval(node.args[0])
            if isinstance(a, list):
                raise _err(node, "cannot raise a dependent variable to a power")
            if node.value < 0:
                if _is_vc(a) or a.degree() > 0:
                    raise _err(node, "negative powers are only allowed for coefficients")
                return self.op(RatFunc.coerce(1) / a.rf ** (-node.value))
            out = self.op(1)
            for _ in range(node.value):
                out = _scalar_mul(out, a)
            return out
        raise _err(node, f"unsupported construct {k}")

    def _operator_name(self, name, node):
        sc = self.sc
        if name == "D":
            if len(sc.ivars) != 1:
                raise _err(node, "bare D is ambiguous with several independent variables; "
                                 "write D_<ivar>")
            return OperatorPoly(OperatorPoly.D(sc.ivars[0]).rf, sc.opvars)
        if name.startswith("D_") and name[2:] in sc.ivars:
            return OperatorPoly(OperatorPoly.D(name[2:]).rf, sc.opvars)
        return None

    def _call(self, node):
        sc = self.sc
        name = node.value
        if name == "int":
            if len(node.args) != 2 or node.args[1].kind != "name" or node.args[1].value not in sc.ivars:
                raise _err(node, "int takes a term and an independent variable: int(term, t)")
            v = node.args[1].value
            inner = self.eval(node.args[0])
            if not isinstance(inner, list):
                raise _err(node, "int(...) must contain a dependent variable")
            out = []
            for d, o, n in inner:
                n2 = dict(n)
                n2[v] = n2.get(v, 0) + 1
                out.append((d, o, n2))
            return out
        base = name.rstrip("'")
        primes = len(name) - len(base)
        if base in sc.funcs:
            args = tuple(self._arg_name(a) for a in node.args)
            decl = sc.funcs[base]
            if args != decl:
                raise _err(node, f"function {base} is declared with arguments ({', '.join(decl)})")
            if args[0] not in sc.ivars:
                raise _err(node, f"first argument of {base} must be an independent variable")
            fs = FuncSymbol(base, primes, args)
            return VcOperator({0: RatFunc.coerce(Poly.symbol(fs))}, args[0])
        raise _err(node, f"undeclared function {base!r}", UndeclaredSymbol)

    def _arg_name(self, a):
        if a.kind != "name":
            raise _err(a, "function arguments must be names")
        return a.value


# -- evaluation of the right-hand side ----------------------------------------------

class _RhsEval:
    def __init__(self, scope):
        self.sc = scope
        self.iv = tuple(scope.ivars)

    def top(self, node):
        if node.kind == "num" and node.value == 0:
            return ExpPoly.zero(self.iv)
        if node.kind == "call" and node.value not in ("exp",) and not self.sc.declared(node.value):
            args = []
            for a in node.args:
                if a.kind != "name":
                    raise _err(a, "forcing arguments must be names")
                args.append(a.value)
            return ForcingSymbol(node.value, tuple(args))
        return self.eval(node)

    def eval(self, node):
        k = node.kind
        sc = self.sc
        if k == "num":
            return ExpPoly.const(self.iv, node.value)
        if k == "name":
            n = node.value
            if n in sc.ivars:
                return ExpPoly.monomial(self.iv, 1, {n: 1})
            if n in sc.params:
                return ExpPoly.const(self.iv, Poly.symbol(n))
            if n == "i":
                return ExpPoly.const(self.iv, GaussQ(0, 1))
            if n in sc.dvars:
                raise _err(node, f"dependent variable {n!r} on the right-hand side")
            raise _err(node, f"undeclared symbol {n!r}", UndeclaredSymbol)
        if k == "call":
            if node.value != "exp" or len(node.args) != 1:
                raise _err(node, "only exp(...) and a single opaque forcing call are allowed here")
            return self._exp(node)
        if k == "neg":
            return -self.eval(node.args[0])
        if k == "add":
            return self.eval(node.args[0]) + self.eval(node.args[1])
        if k == "sub":
            return self.eval(node.args[0]) - self.eval(node.args[1])
        if k == "mul":
            return self.eval(node.args[0]) * self.eval(node.args[1])
        if k == "div":
            den = self.eval(node.args[1])
            c = _numeric_const(den)
            if c is None:
                raise _err(node, "right-hand side may only divide by numbers")
            if not c:
                raise _err(node, "division by zero")
            return self.eval(node.args[0]).scale(ONE / c)
        if k == "pow":
            if node.value < 0:
                raise _err(node, "negative powers are not exponential polynomials")
            base = self.eval(node.args[0])
            out = ExpPoly.const(self.iv, 1)
            for _ in range(node.value):
                out = out * base
            return out
        raise _err(node, f"unsupported construct {k}")

    def _exp(self, node):
        arg = self.eval(node.args[0])
        ex = {}
        zero = (ZERO,) * len(self.iv)
        for (pw, e), c in arg.terms.items():
            if e != zero or sum(pw) != 1 or not c.is_const():
                raise _err(node, "exp(...) needs a linear combination of independent variables "
                                 "with numeric coefficients")
            v = self.iv[pw.index(1)]
            ex[v] = ex.get(v, ZERO) + c.const_value()
        return ExpPoly.exp(self.iv, ex)


def _numeric_const(f):
    if f.is_zero():
        return ZERO
    if len(f.terms) != 1:
        return None
    (pw, ex), c = next(iter(f.terms.items()))
    if any(pw) or any(ex) or not c.is_const():
        return None
    return c.const_value()


# -- driver -------------------------------------------------------------------------

@dataclass
class SourceSystem:
    text: str
    system: DaeSystem
    spans: dict
    equation_spans: list


def _parse_idlist(p, header):
    names = []
    if p.cur.text == ";":
        p.next()
        return names
    while True:
        t = p.cur
        if t.kind != "name":
            raise p.error(f"expected a name in the {header} list")
        p.next()
        if header == "funcs":
            p.expect("(")
            args = []
            while True:
                a = p.cur
                if a.kind != "name":
                    raise p.error("expected an argument name")
                p.next()
                args.append(a.text)
                if not p.accept(","):
                    break
            p.expect(")")
            names.append((t.text, tuple(args)))
        else:
            names.append(t.text)
        if p.accept(";"):
            return names
        p.expect(",")


_RESERVED = {"D", "int", "exp", "eq", "i"} | set(HEADERS)


def parse_system(text):
    """Parse ``.dae`` source into a :class:`SourceSystem`."""
    p = _Parser(tokenize(text))
    decl = {h: [] for h in HEADERS}
    seen = set()
    while p.cur.kind == "name" and p.cur.text in HEADERS and p.toks[p.i + 1].text == ":":
        h = p.next().text
        if h in seen:
            raise p.error(f"duplicate {h}: header", p.toks[p.i - 1])
        seen.add(h)
        p.expect(":")
        decl[h] = _parse_idlist(p, h)
    if "ivars" not in seen:
        raise p.error("missing ivars: header")
    if "vars" not in seen:
        raise p.error("missing vars: header")
    names = decl["ivars"] + decl["vars"] + decl["params"] + decl["opaque"] + [
        n for n, _ in decl["funcs"]]
    dup = {n for n in names if names.count(n) > 1}
    if dup:
        raise ParseError(f"symbol declared twice: {', '.join(sorted(dup))}", 1, 1)
    for n in names:
        if n in _RESERVED - {"i"} or (n.startswith("D_") and n[2:] in decl["ivars"]):
            raise ParseError(f"{n!r} is reserved", 1, 1)
    scope = _Scope(decl["ivars"], decl["vars"], decl["params"], decl["opaque"], decl["funcs"])
    lhs_eval, rhs_eval = _LhsEval(scope), _RhsEval(scope)
    rows, forcing, spans, eq_spans, notes = [], [], {}, [], []
    n = len(scope.dvars)
    while p.cur.kind != "eof":
        start = p.cur
        if start.text != "eq":
            raise p.error(f"expected 'eq:' or end of input, found {start.text!r}")
        p.next()
        p.expect(":")
        lhs_node = p.expr()
        p.expect("=")
        rhs_node = p.expr()
        end = p.expect(";")
        r = len(rows)
        span = Span(start.line, start.col, end.line, end.col)
        eq_spans.append(span)
        terms = lhs_eval.eval(lhs_node)
        if not isinstance(terms, list):
            raise _err(lhs_node, "left-hand side has no dependent variable")
        f = rhs_eval.top(rhs_node)
        counts = {}
        for _, _, ints in terms:
            for v, c in ints.items():
                counts[v] = max(counts.get(v, 0), c)
        row = {}
        for d, o, ints in terms:
            for v, c in counts.items():
                for _ in range(c - ints.get(v, 0)):
                    o = _scalar_mul(OperatorPoly(OperatorPoly.D(v).rf, scope.opvars), o)
            row[d] = _scalar_add(row[d], o) if d in row else o
        if counts:
            if isinstance(f, ForcingSymbol):
                raise _err(rhs_node, "an int(...) row needs a zero or explicit right-hand side")
            for v, c in counts.items():
                for _ in range(c):
                    f = f.diff(v)
            notes.append((r, {v: c for v, c in counts.items()}))
        entries = []
        for d in scope.dvars:
            e = row.get(d)
            if e is None:
                e = OperatorPoly(0, scope.opvars)
            elif _is_vc(e) and e.is_constant():
                e = OperatorPoly(e.to_operator().rf, scope.opvars)
            elif not _is_vc(e):
                e = OperatorPoly(e.rf, scope.opvars)
            entries.append(e)
            spans[(r, d)] = span
        rows.append(entries)
        forcing.append(f)
    if len(rows) != n:
        raise ArityError(f"{len(rows)} equations for {n} dependent variables", p.cur.line, p.cur.col)
    s = DaeSystem(scope.ivars, scope.dvars, rows, forcing, scope.params + scope.opaque,
                  tuple(scope.opaque), tuple(notes), tuple(decl["funcs"]))
    return SourceSystem(text, s, spans, eq_spans)


def parse_file(path):
    with open(path, encoding="utf-8") as fh:
        return parse_system(fh.read())
