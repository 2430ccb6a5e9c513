"""Exception types raised by mincouple.

Two families: ``ModelValidationError`` for inputs outside a model's domain
(the CLI maps these to exit status 2) and ``NumericalError`` for failures of
a computation on valid input (exit status 3).
"""


class MinCoupleError(Exception):
    """Base class for all package errors."""


class ModelValidationError(MinCoupleError, ValueError):
    pass


class NumericalError(MinCoupleError, ArithmeticError):
    pass


class NonConvergent(NumericalError):
    """An integral or series does not converge for the supplied data."""


class UnphysicalKernel(NumericalError):
    """A susceptibility whose sine transform is negative somewhere."""


class IRDivergent(NumericalError):
    """A frequency integral diverges at its lower limit."""


class StepTooLarge(NumericalError):
    """Time step violates the solver's stability guard."""


class PoleOnAxis(NumericalError):
    """Requested Laplace point sits on a pole of the transform."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not reach the requested tolerance."""


class Overdamped(ModelValidationError):
    """Closed-form solution requested outside the underdamped regime."""


class AmplifierRegime(ModelValidationError):
    """Position-coupling strength outside the absorptive range."""


class DeltaRegularization(ModelValidationError):
    """Resonant bath quanta supplied without a line density."""


class DimensionBudget(ModelValidationError):
    """Truncated Hilbert space larger than the configured budget."""


class WindowInvalid(ModelValidationError):
    """Fit window outside the regime where the fit is meaningful."""


class WindowExcludesResonance(UserWarning):
    """Discretisation window does not contain the system frequency."""
