"""Error types shared across the package."""


class OeocimError(Exception):
    """Base class for all package errors."""


class DimensionError(OeocimError, ValueError):
    """A vector or matrix does not match the problem dimension."""


class SpinDomainError(OeocimError, ValueError):
    """A state vector leaves its required domain ([-1/2, 1/2] box or {-1, +1})."""


class UnsupportedSizeError(OeocimError, ValueError):
    """The instance is too large for the requested exhaustive computation."""


class ParameterError(OeocimError, ValueError):
    """A numeric parameter is outside its admissible range."""


class FlatObjectiveError(OeocimError, ValueError):
    """The objective is constant; ratio-based estimates are undefined."""


class WindowError(OeocimError, ValueError):
    """A fit window contains unusable (nonpositive or empty) data."""


class InsufficientHorizonError(OeocimError, ValueError):
    """The recorded horizon is shorter than the requested iteration index."""


class FormatError(OeocimError, ValueError):
    """A serialized file violates its schema.

    Carries the offending field name so front ends can report it.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"field '{field}': {message}")
