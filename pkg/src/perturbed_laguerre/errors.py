"""Exception types shared by every module of the package."""


class LaguerreLabError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(LaguerreLabError, ValueError):
    """An argument lies outside the domain of the requested quantity."""


class PrecisionError(LaguerreLabError, ArithmeticError):
    """The working precision is insufficient for the requested accuracy."""


class ConsistencyError(LaguerreLabError, ArithmeticError):
    """Two independent computations of the same quantity disagree."""


class QuadratureError(LaguerreLabError, ArithmeticError):
    """A quadrature failed to reach its tolerance.

    ``achieved`` holds the error estimate that was actually reached.
    """

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class SingularityError(LaguerreLabError, ArithmeticError):
    """An ODE trajectory hit a singularity; ``s`` is the last good abscissa."""

    def __init__(self, message, s=None):
        super().__init__(message)
        self.s = s


class SeriesError(LaguerreLabError, ValueError):
    """A series cannot be generated or evaluated as requested."""


class FitQualityError(LaguerreLabError, ArithmeticError):
    """A fitted constant has a spread larger than its expected tail."""
