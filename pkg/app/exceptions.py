"""Exception hierarchy shared by the services and the CLI."""

from typing import Any


class ThueFamilyError(Exception):
    """Base class for classified errors.

    Carries the family parameters involved so callers can report them
    without parsing the message.
    """

    def __init__(
        self,
        message: str,
        *,
        n: int | None = None,
        a: int | None = None,
        detail: dict[str, Any] | None = None,
    ):
        super().__init__(message)
        self.n = n
        self.a = a
        self.detail = detail or {}


class ParameterMismatchError(ThueFamilyError):
    """Two order elements belong to different fields."""


class NotAUnitError(ThueFamilyError):
    """Inversion requested for an element whose norm is not ±1."""


class DegenerateFormError(ThueFamilyError):
    """F_{n,0} = (X - Y)^3 requested without the degenerate flag."""


class PreconditionError(ThueFamilyError):
    """Caller violated an operation's precondition."""


class ZeroValueError(ThueFamilyError):
    """The form vanishes at the given point."""


class IntervalDomainError(ThueFamilyError):
    """Interval operation outside its domain, e.g. log of an interval containing 0."""


class PrecisionExhaustedError(ThueFamilyError):
    """Refinement hit the configured precision cap.

    Raised internally as a retry signal; reaches the user only at the cap.
    """

    def __init__(self, message: str, *, bits: int, **kwargs: Any):
        super().__init__(message, **kwargs)
        self.bits = bits


class DecompositionNotNormalizedError(ThueFamilyError):
    """No (A, B) in the search neighbourhood gives a normalized remainder."""

    def __init__(self, message: str, *, best: Any = None, **kwargs: Any):
        super().__init__(message, **kwargs)
        self.best = best


class InvariantViolationError(ThueFamilyError):
    """An internal identity failed; always a bug."""


class CheckpointMismatchError(ThueFamilyError):
    """Checkpoint file was written by a different search configuration."""


class SearchInterruptedError(ThueFamilyError):
    """Grid search stopped by a signal before every cell finished."""
