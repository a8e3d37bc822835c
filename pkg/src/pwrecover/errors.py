"""Exception hierarchy shared by all pwrecover modules.

``DomainError`` and ``ConfigError`` signal bad input (argument outside a
documented domain, malformed experiment configuration).  ``NumericalError``
and its subclasses signal that the inputs were admissible but a computation
could not be completed to its accuracy contract.
"""


class PWRecoverError(Exception):
    """Base class for all pwrecover errors."""


class DomainError(PWRecoverError, ValueError):
    """An argument lies outside the documented domain of an operation."""


class ConfigError(PWRecoverError, ValueError):
    """An experiment configuration failed validation.

    The message names the offending field with a dotted path, e.g.
    ``kernel.parameters: ladder must be strictly increasing``.
    """


class NumericalError(PWRecoverError, RuntimeError):
    """A computation could not meet its accuracy contract."""


class QuadratureError(NumericalError):
    """Panel doubling failed to reach the requested quadrature tolerance."""


class NotPositiveDefiniteError(NumericalError):
    """Symmetric factorization failed; the matrix is not numerically SPD.

    ``pivot_index`` is the zero-based order of the first leading minor that
    fails to factor.
    """

    def __init__(self, message, pivot_index=None):
        super().__init__(message)
        self.pivot_index = pivot_index


class ResidualToleranceError(NumericalError):
    """Iterative refinement stalled above the requested residual tolerance.

    Carries the final measured residual and the tolerance so callers can
    report how far the solve fell short.
    """

    def __init__(self, message, residual=None, tolerance=None):
        super().__init__(message)
        self.residual = residual
        self.tolerance = tolerance


class UnusableWindowError(NumericalError):
    """A node window whose exponential Gram has no usable lower bound."""
