"""Exception hierarchy."""


class OddWalkError(Exception):
    """Base class for all package errors."""


class ConfigurationError(OddWalkError, ValueError):
    """Bad user-supplied parameter (out-of-range k, unknown mode, ...)."""


class InvariantViolation(OddWalkError, RuntimeError):
    """A structural invariant that must hold by construction did not."""


class NumericError(OddWalkError, ArithmeticError):
    """A numerical routine failed or produced non-finite output."""


class PoleProximityError(NumericError):
    """Continued-fraction evaluation landed on (or next to) an atom."""

    def __init__(self, message: str, nearest_atom: float | None = None):
        super().__init__(message)
        self.nearest_atom = nearest_atom


class ConsistencyError(NumericError):
    """Two independent routes to the same quantity disagree."""
