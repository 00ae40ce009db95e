"""Command line front end: ``daekit {govern|solve|charpoly|check} FILE``."""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

from .dsl import parse_system
from .errors import (
    DaeKitError,
    ParseError,
    SymbolicCoefficientsRemain,
    SymbolicCoefficientUnsupported,
    VcUnsupportedHere,
)
from .governing import govern
from .numcheck import Grid, check_solution, default_rng
from .render import load_json_system, render
from .roots import roots_of_operator
from .scalar import GaussQ
from .solver import FACTORIZATION, PARTIAL_FRACTIONS, NotSeparable, solve
from .system import operator_det, validate_system

MODES = {"factor": FACTORIZATION, "pfrac": PARTIAL_FRACTIONS}


@dataclass
class CommandResult:
    code: int
    output: str = ""
    error: str = ""


class _ArgError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgError(message)


def build_parser():
    p = _Parser(prog="daekit", description="Governing equations and solutions of linear DAE systems.")
    p.add_argument("command", choices=["govern", "solve", "charpoly", "check"])
    p.add_argument("file")
    p.add_argument("--var", help="target dependent variable (default: the last one)")
    p.add_argument("--assign", default="", help="parameter values, k=v,...")
    p.add_argument("--mode", choices=sorted(MODES), default="factor")
    p.add_argument("--particular-only", action="store_true")
    p.add_argument("--monic", action="store_true")
    p.add_argument("--reduce", action="store_true",
                   help="cancel pivot factors common to both sides")
    p.add_argument("--format", choices=["text", "latex", "json"], default="text")
    p.add_argument("--latex", action="store_true", help="same as --format latex")
    p.add_argument("--grid", default=None, help="check grid start:stop:points")
    p.add_argument("--tol", type=float, default=None, help="check tolerance")
    p.add_argument("-o", "--output", default=None)
    return p


def parse_assign(text):
    """``'m1=1,k1=1/2,w=2i'`` -> {name: GaussQ}."""
    out = {}
    for item in filter(None, (x.strip() for x in text.split(","))):
        name, eq, value = item.partition("=")
        if not eq or not name.strip():
            raise ParseError(f"bad assignment {item!r}; expected name=value")
        try:
            out[name.strip()] = GaussQ.parse(value)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad value in assignment {item!r}") from None
    return out


def load_system(path):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if path.endswith(".json"):
        return load_json_system(text).system
    return parse_system(text).system


def _grid(text, ivar):
    if not text:
        return Grid(ivar)
    try:
        a, b, n = text.split(":")
        return Grid(ivar, float(a), float(b), int(n))
    except ValueError:
        raise ParseError(f"bad grid {text!r}; expected start:stop:points") from None


def _charpoly(s, fmt):
    kind = validate_system(s)
    if kind.is_vc:
        raise VcUnsupportedHere("det M(a) needs constant coefficients; use govern for this system")
    det = operator_det(s)
    if kind.is_pde or det.params():
        # no numeric root set; report the determinant alone
        return render(det, fmt) + ("" if fmt == "json" else "\n")
    return render((det, roots_of_operator(det)), fmt)


def _execute(args):
    fmt = "latex" if args.latex else args.format
    s = load_system(args.file)
    assign = parse_assign(args.assign)
    unknown = set(assign) - set(s.params)
    if unknown:
        raise ParseError(f"--assign names undeclared parameters: {', '.join(sorted(unknown))}")
    if assign:
        s = s.subs(assign)
    if args.command == "govern":
        target = args.var or s.dvars[-1]
        g = govern(s, target, monic=args.monic, reduce=args.reduce)
        return 0, render(g, fmt, opaque=s.opaque)
    if args.command == "charpoly":
        return 0, _charpoly(s, fmt)
    if s.params:
        raise SymbolicCoefficientsRemain(
            f"{args.command} needs numeric parameters; use --assign for {', '.join(s.params)}")
    sol = solve(s, MODES[args.mode], args.particular_only)
    if isinstance(sol, NotSeparable):
        raise SymbolicCoefficientUnsupported(str(sol))
    if args.command == "solve":
        if args.var:
            s.index(args.var)
            sol = {args.var: sol[args.var]}
        return 0, render(sol, fmt, mode=args.mode)
    rep = check_solution(s, sol, tol=args.tol, grid=_grid(args.grid, s.ivars[0]), rng=default_rng())
    out = render(rep, "json" if fmt == "json" else "text")
    return (0 if rep.passed else 1), out


def run_command(argv):
    """Run one invocation; returns a :class:`CommandResult` instead of exiting."""
    try:
        args = build_parser().parse_args(argv)
    except _ArgError as err:
        return CommandResult(2, "", f"daekit: {err}\n")
    try:
        code, out = _execute(args)
    except OSError as err:
        return CommandResult(2, "", f"daekit: cannot read input: {err}\n")
    except DaeKitError as err:
        return CommandResult(err.exit_code, "", f"daekit: {type(err).__name__}: {err}\n")
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out)
        out = ""
    return CommandResult(code, out)


def main(argv=None):
    res = run_command(sys.argv[1:] if argv is None else argv)
    if res.output:
        sys.stdout.write(res.output)
    if res.error:
        sys.stderr.write(res.error)
    return res.code


if __name__ == "__main__":
    sys.exit(main())
