"""Exception hierarchy shared by all diffabs modules."""


class DiffabsError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(DiffabsError):
    """An argument lies outside the mathematical domain of an operation."""


class WrongVariantError(DiffabsError):
    """An operation was called with the wrong nonlinearity variant."""


class NumericalFailure(DiffabsError):
    """A numerical procedure failed to converge.

    Carries the best available estimate and an error bound when the
    failing procedure can provide them.
    """

    def __init__(self, message, estimate=None, error_bound=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class StepFailure(NumericalFailure):
    """Time integration could not complete a step after retries."""

    def __init__(self, message, t_fail=None):
        super().__init__(message)
        self.t_fail = t_fail


class ComparisonViolation(NumericalFailure):
    """A computed field exceeded its flat supersolution beyond tolerance."""


class NotFoundError(DiffabsError):
    """A bracketed search ended without finding the requested object."""


class InsufficientDataError(DiffabsError):
    """Tabulated input does not cover the range needed by an operation."""


class InsufficientResolutionError(DiffabsError):
    """Stored snapshots are too sparse for the requested post-processing."""


class IncompleteSweepError(DiffabsError):
    """A k-sweep aborted before filling its table."""
