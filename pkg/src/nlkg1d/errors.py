"""Exception types shared by all modules."""


class Error(Exception):
    """Base class for every error raised by this package."""


class NonPositiveCoefficient(Error):
    """A model coefficient (a, b or m) is zero, negative or not finite."""


class RegimeViolation(Error):
    """The parameters fall outside the regime tau = 2 m^2 b / a^2 > 1."""


class DomainViolation(Error):
    """An argument lies outside the admissible interval of an operation."""


class ToleranceFailure(Error):
    """A root bracket could not be established or refined."""


class IntegrationBlowup(Error):
    """The profile initial-value integration left the decaying orbit."""


class ConvergenceFailure(Error):
    """An iterative eigensolve did not converge within its iteration cap."""


class NumericBlowup(Error):
    """The time integration produced amplitudes beyond the safety bound.

    The ``time`` attribute carries the simulation time at detection.
    """

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class GridMismatch(Error):
    """A simulation box is too small to contain the profile tail."""


class PreconditionViolation(Error):
    """An explicit precondition of an operation does not hold."""
