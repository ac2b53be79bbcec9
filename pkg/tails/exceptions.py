"""Errors raised by the toolkit.

Each class carries the process exit code a management command reports for it:
2 usage, 3 data, 4 numeric or convergence failure.
"""


class TailsError(Exception):
    exit_code = 4


class ParameterError(TailsError, ValueError):
    """Invalid distribution fields or function arguments."""
    exit_code = 2


class DomainError(ParameterError):
    """Argument outside the domain of a function."""


class UndefinedMomentError(TailsError, ArithmeticError):
    """The requested moment is infinite or undefined for the given tail exponent."""
    exit_code = 4


class DegenerateError(TailsError, ArithmeticError):
    exit_code = 4


class InsufficientDataError(TailsError):
    exit_code = 3


class DataError(TailsError):
    exit_code = 3

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class ConvergenceError(TailsError, ArithmeticError):
    exit_code = 4

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
