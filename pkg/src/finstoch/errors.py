"""Exceptions shared across the package."""

__all__ = ["SpecError", "ResourceError"]


class SpecError(ValueError):
    """A value violates a documented precondition or schema."""


class ResourceError(RuntimeError):
    """An enumeration exceeded its configured size budget.

    Carries the offending cardinality so callers can report it.
    """

    def __init__(self, message, cardinality=None):
        super().__init__(message)
        self.cardinality = cardinality
