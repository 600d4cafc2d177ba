"""
Exception hierarchy shared by the numerical kit, the models and the engines.
"""
from typing import Optional


class CalibrationError(Exception):
    """Base class for every error raised by this package."""


class DomainError(CalibrationError, ValueError):
    """Parameter or input outside the domain of an operation."""


class ContractViolation(CalibrationError, ValueError):
    """Input breaks a documented precondition (e.g. unnormalized weights)."""


class DegenerateWeightsError(CalibrationError):
    """All log-weights are -inf, so no normalization exists."""


class FactorizationError(CalibrationError):
    """Cholesky factorization failed on a non-SPD matrix."""

    def __init__(self, pivot: int, message: Optional[str] = None):
        self.pivot = pivot
        super().__init__(message or f"matrix is not positive definite (pivot {pivot} is not positive)")

    def __reduce__(self):
        return (type(self), (self.pivot, str(self)))


class SimulationError(CalibrationError):
    """A posterior simulation failed for one bootstrap replicate."""

    def __init__(self, replicate: int, cause: BaseException):
        self.replicate = replicate
        self.cause = cause
        super().__init__(f"simulation failed for replicate {replicate}: {cause}")

    def __reduce__(self):
        return (type(self), (self.replicate, self.cause))


class IngestionError(CalibrationError):
    """Dataset file does not match the expected layout."""


class DegenerateSetError(CalibrationError):
    """Too few particles to form a credible set."""
