"""Exception hierarchy shared by every module.

Each concrete class maps to its own CLI exit code (see ``matfn.cli``).
"""


class MatfnError(Exception):
    """Base class for all library errors."""

    exit_code = 10


class ParseError(MatfnError, ValueError):
    exit_code = 3


class PreconditionError(MatfnError, ValueError):
    """A hypothesis required by an operation does not hold for the inputs."""

    exit_code = 4


class DomainError(MatfnError, ValueError):
    """Input outside the domain of a function (gamma pole, t <= 0, ...)."""

    exit_code = 5


class NumericError(MatfnError, ArithmeticError):
    """Overflow, eigen-solver failure or other floating point breakdown."""

    exit_code = 6


class AccuracyError(NumericError):
    """Quadrature or series failed its own convergence check."""

    exit_code = 7
