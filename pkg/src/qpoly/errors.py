"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class QNearOneError(DomainError):
    """q is too close to 1 for a certified series evaluation.

    The term ratio of the exponential series tends to 1 as q -> 1, so the
    certified truncation bound cannot be met within any reasonable term cap.
    Behaviour in the q -> 1 limit is covered by the classical oracle instead.
    """


class NonConvergence(ArithmeticError):
    """The series term cap was reached before the tail bound was certified."""

    def __init__(self, message: str, terms_used: int = 0):
        super().__init__(message)
        self.terms_used = terms_used


class LengthError(ValueError):
    """A sequence is too short for the requested difference order."""
