"""Exception hierarchy.

Every domain failure derives from :class:`TangnetError`; the CLI maps these to
exit status 1. Subclasses also inherit from the closest builtin so callers can
catch ``ValueError`` where that reads more naturally.
"""


class TangnetError(Exception):
    """Base class for all domain errors raised by this package."""


class SizeLimitError(TangnetError, ValueError):
    """Total Hilbert-space dimension exceeds the configured cap."""


class ShapeError(TangnetError, ValueError):
    """Array shapes are inconsistent with the declared party dimensions."""


class ArgumentError(TangnetError, ValueError):
    """An argument is outside the operation's domain."""


class ContractViolation(TangnetError, ValueError):
    """Input does not satisfy a required structural property (e.g. Hermiticity)."""


class InvalidDensityError(TangnetError, ValueError):
    """Matrix is not a valid density operator."""


class SpaceError(TangnetError, ValueError):
    """States live on incompatible multipartite spaces."""


class StructureError(TangnetError, ValueError):
    """A quantum structure violates its invariants."""


class InvariantViolation(TangnetError, AssertionError):
    """A symmetry invariant failed during a verification run."""


class ParseError(TangnetError):
    """Diagnostic for malformed DSL input.

    Carries a 1-based ``line``/``column`` and the set of tokens that would
    have been accepted at that position.
    """

    def __init__(self, message, line, column, expected):
        self.message = message
        self.line = line
        self.column = column
        self.expected = tuple(sorted(set(expected)))
        super().__init__(str(self))

    def __str__(self):
        exp = ", ".join(self.expected)
        return f"{self.line}:{self.column}: {self.message} (expected: {exp})"
