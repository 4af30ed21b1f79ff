"""Exception types shared across the package."""


class WickGraphError(Exception):
    """Base class for all package errors."""


class ValidationError(WickGraphError, ValueError):
    """Malformed input: dimension mismatch, bad index, unparsable config."""


class GuardError(WickGraphError):
    """A size guard, dimension cap or term budget was tripped."""


class SamplingError(WickGraphError):
    """Covariance factorization failed even after jitter escalation."""
