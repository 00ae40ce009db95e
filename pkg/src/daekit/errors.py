"""Exception hierarchy shared by all engines.

Each error carries an ``exit_code`` used by the command line front end.
"""


class DaeKitError(Exception):
    exit_code = 1


class ParseError(DaeKitError):
    exit_code = 2

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class ArityError(ParseError):
    pass


class UndeclaredSymbol(ParseError):
    pass


class DivisionByZero(DaeKitError, ZeroDivisionError):
    pass


class UnboundSymbol(DaeKitError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class UnboundConstant(UnboundSymbol):
    pass


class NumericPole(DaeKitError):
    exit_code = 5


class SymbolicCoefficientUnsupported(DaeKitError):
    exit_code = 4


class NonConstantLeftFactor(DaeKitError):
    exit_code = 4


class NonSquare(DaeKitError):
    exit_code = 3


class SingularSystem(DaeKitError):
    exit_code = 3


class StructurallySingular(SingularSystem):
    pass


class UndeclaredOperator(DaeKitError):
    exit_code = 2


class UnknownVariable(DaeKitError):
    exit_code = 2


class VcUnsupportedHere(DaeKitError):
    exit_code = 4


class VcConditionViolated(DaeKitError):
    exit_code = 4


class SymbolicCoefficientsRemain(DaeKitError):
    exit_code = 4


class NonConvergence(DaeKitError):
    exit_code = 5


class RepeatedRoots(DaeKitError):
    exit_code = 5


class NotReducible(DaeKitError):
    exit_code = 4
