"""Shared exception hierarchy."""


class KoebeError(Exception):
    """Base class for all library-specific errors."""


class ValidationError(KoebeError):
    """Input violates a structural invariant."""


class ComputationError(KoebeError):
    """A computation could not be completed."""
