# errors.py
"""
Exception hierarchy shared by the solvers, the parser and the harness.
Input-facing errors subclass ValueError so callers can catch either.
"""


class UnificationError(Exception):
    """Base class for every error raised by this package."""


class SignatureError(UnificationError, ValueError):
    """A term mentions a constant, a function symbol or a foreign operator."""


class StandardFormError(UnificationError, ValueError):
    """An equation does not have a variable side and a depth-1 side."""


class ProblemParseError(UnificationError, ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.reason = message


class MixedOrientationError(ProblemParseError):
    """A problem file mixes symmetric `=` lines with asymmetric `=d` lines."""


class NotDagSolvedError(UnificationError):
    pass


class MaterializationError(UnificationError):
    """Expanding a compressed object would exceed the configured cap."""

    def __init__(self, what: str, size: int, cap: int):
        super().__init__(f"{what} is not materializable: size {size} exceeds cap {cap}")
        self.size = size
        self.cap = cap


class SlpRangeError(UnificationError, ValueError):
    pass


class NotInFragmentError(UnificationError, ValueError):
    """The system is outside the typed single-homomorphism fragment."""


class InvariantViolation(UnificationError, AssertionError):
    """A bookkeeping lemma failed during a run with invariant checks on."""
