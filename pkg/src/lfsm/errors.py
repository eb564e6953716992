"""Exception hierarchy shared across the package."""

__all__ = ["LfsmError", "DomainError", "OutOfRangeError", "ShapeError", "DegenerateInputError", "QuadratureError", "ResourceError"]


class LfsmError(Exception):
    """Base class for all package errors."""


class DomainError(LfsmError, ValueError):
    """An argument lies outside the domain of the operation."""


class OutOfRangeError(DomainError):
    """A target value lies outside the range of a monotone map.

    ``endpoint`` holds the nearer end of the admissible interval so callers
    can clamp instead of failing.
    """

    def __init__(self, message, endpoint):
        super().__init__(message)
        self.endpoint = endpoint


class ShapeError(LfsmError, ValueError):
    """Input sequence is too short for the requested filter."""


class DegenerateInputError(LfsmError, ArithmeticError):
    """Data makes a statistic undefined (e.g. zero increments with a negative power)."""


class QuadratureError(LfsmError, ArithmeticError):
    """A numerical integral could not be computed to the requested tolerance."""


class ResourceError(LfsmError, MemoryError):
    """A request would exceed a configured size cap."""
