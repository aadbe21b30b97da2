"""Exception types shared across the toolkit."""


class OpConnectError(Exception):
    """Base class for all toolkit errors."""


class NonFiniteError(OpConnectError):
    """A matrix contains NaN or infinite entries."""


class DimMismatchError(OpConnectError):
    """Operands have incompatible dimensions."""


class NotPsdError(OpConnectError):
    """A matrix fails positive-semidefinite validation."""


class NotPdError(OpConnectError):
    """A matrix is not strictly positive definite."""


class DomainError(OpConnectError):
    """A scalar function is undefined at a required point."""


class RangeError(OpConnectError):
    """A target value lies outside the range of a representing function."""

    def __init__(self, message, gap=None):
        super().__init__(message)
        self.gap = gap


class NotInjectiveError(OpConnectError):
    """Inversion requested for a non-injective (constant) function."""


class NoConvergenceError(OpConnectError):
    """A regularization schedule was exhausted before convergence."""

    def __init__(self, message, last_gap=None):
        super().__init__(message)
        self.last_gap = last_gap


class NotAMeanError(OpConnectError):
    """An operation requiring a mean (f(1) = 1) was given a non-mean."""
