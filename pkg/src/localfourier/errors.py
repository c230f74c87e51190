"""Shared exception taxonomy.

DomainError covers violated preconditions (bad slope range, zero divisors,
unsupported field extensions); PrecisionError marks results that would need
more series terms than are known; ParseError carries a source location; and
InternalError flags broken internal invariants.  The CLI maps these to exit
codes 1, 1, 2 and 3 respectively.
"""


class LocalFourierError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(LocalFourierError):
    """A precondition on the requested operation does not hold."""


class PrecisionError(DomainError):
    """Known series terms do not determine the requested result."""


class FieldError(DomainError):
    """Unsupported or degenerate coefficient-field operation."""


class TowerDepthError(FieldError):
    """Radical nesting exceeds the supported depth."""


class ParseError(LocalFourierError):
    """Malformed DSL input; carries a 1-based source location."""

    def __init__(self, message, line, column):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class InternalError(LocalFourierError):
    """An internal invariant was violated; indicates a bug, not bad input."""
