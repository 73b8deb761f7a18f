"""Exception hierarchy shared across the package.

Every error raised on purpose derives from :class:`StochLPError` so that the
CLI can map failures onto its exit codes (2 for input problems, 3 for
numerical failures).
"""


class StochLPError(Exception):
    """Base class for all errors raised by stochlp."""


class ShapeError(StochLPError, ValueError):
    """Dimension mismatch or malformed array input."""


class DomainError(StochLPError, ValueError):
    """Input value outside the documented domain (nonpositive weights, ...)."""


class FactorizationError(StochLPError, ArithmeticError):
    """Symmetric factorization failed even after the jitter retry."""

    def __init__(self, message, pivot=None):
        super().__init__(message)
        self.pivot = pivot


class PotentialOverflowError(StochLPError, OverflowError):
    """cosh/sinh argument exceeded the clamp; the iterate has diverged."""


class StepUnboundedError(StochLPError, RuntimeError):
    """Resample cap hit without finding a bounded stochastic step."""


class PositivityLostError(StochLPError, RuntimeError):
    """A step produced a nonpositive primal or dual coordinate."""


class CenteringFailedError(StochLPError, RuntimeError):
    """Deterministic recentering did not reach its target accuracy."""


class EnumerationGuardError(StochLPError, ValueError):
    """Vertex enumeration refused: instance exceeds the size guard."""


class InstanceFormatError(StochLPError, ValueError):
    """Instance file malformed; carries line/column diagnostics when known."""

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column
