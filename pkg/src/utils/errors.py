"""
Error Types
Exception hierarchy shared by every module and mapped to CLI exit codes.
"""

from typing import Optional


class LagrangianGammaError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatchError(LagrangianGammaError, ValueError):
    """Operands do not have compatible shapes."""


class InvariantViolationError(LagrangianGammaError, ValueError):
    """
    A value fails one of the invariants of its type.

    Attributes:
        invariant: Short name of the violated invariant
        deviation: Measured deviation, if one was computed
    """

    def __init__(self, invariant: str, deviation: Optional[float] = None, detail: str = ""):
        self.invariant = invariant
        self.deviation = deviation
        message = f"invariant violated: {invariant}"
        if deviation is not None:
            message += f" (deviation {deviation:.3e})"
        if detail:
            message += f": {detail}"
        super().__init__(message)


class ScopeError(LagrangianGammaError, ValueError):
    """Input is well-formed but outside the supported scope (even n, budget, ...)."""


class DegeneracyError(LagrangianGammaError, ArithmeticError):
    """A point is not regular, or a matrix that must be invertible is singular."""


class VerificationError(LagrangianGammaError, RuntimeError):
    """Two independent computations of the same quantity disagree."""
