"""Error types shared across the package."""

from __future__ import annotations


class Chi2NormError(Exception):
    """Base class for all package errors."""


class DomainError(Chi2NormError, ValueError):
    """An argument lies outside the documented domain."""


class CapacityError(Chi2NormError):
    """A size or order limit was exceeded."""


class AccuracyError(Chi2NormError):
    """A computation failed to reach the requested accuracy.

    Carries the best available estimate so callers can inspect how far the
    computation got before it gave up.
    """

    def __init__(self, message: str, *, value: float | None = None,
                 error_estimate: float | None = None) -> None:
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate
