"""Governing equations and analytic solutions of linear DAE systems.

Systems are square matrices of differential-operator polynomials acting
on a vector of dependent variables.  The package derives single-variable
governing equations by elimination over the operator fraction field,
solves constant-coefficient systems in closed form over exponential
polynomials, and checks results numerically.
"""

from .dsl import SourceSystem, parse_file, parse_system
from .errors import DaeKitError, ParseError, VcConditionViolated
from .expfunc import ConstPool, ConstSymbol, ExpPoly
from .governing import (
    GoverningEquation,
    eliminate_governing,
    govern,
    governing_via_determinant,
    vc_governing,
)
from .numcheck import Grid, ResidualReport, check_solution, finite_diff_check, residual_check, rk4_oracle
from .operators import OperatorPoly, VcOperator
from .render import load_json_system, render
from .roots import RootSet, characteristic_roots, find_roots
from .scalar import GaussQ, Poly, RatFunc
from .solver import NotSeparable, partial_fractions, solve, solve_full, solve_separable_pdae
from .system import DaeSystem, ForcingSymbol, operator_det

__all__ = [
    "SourceSystem", "parse_file", "parse_system", "DaeKitError", "ParseError",
    "VcConditionViolated", "ConstPool", "ConstSymbol", "ExpPoly", "GoverningEquation",
    "eliminate_governing", "govern", "governing_via_determinant", "vc_governing", "Grid",
    "ResidualReport", "check_solution", "finite_diff_check", "residual_check", "rk4_oracle",
    "OperatorPoly", "VcOperator", "load_json_system", "render", "RootSet", "characteristic_roots",
    "find_roots", "GaussQ", "Poly", "RatFunc", "NotSeparable", "partial_fractions", "solve",
    "solve_full", "solve_separable_pdae", "DaeSystem", "ForcingSymbol", "operator_det",
    "corpus_path",
]

__version__ = "0.1.0"


def corpus_path(name=""):
    """Filesystem path of the bundled example systems (or one of them)."""
    from importlib.resources import files

    return str(files(__package__) / "corpus" / name) if name else str(files(__package__) / "corpus")
