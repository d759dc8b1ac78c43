"""Exceptions raised by the evaluators.

Check functions catch these and turn them into a status on the returned
:class:`~qsv.result.CheckResult`; the raw evaluators let them propagate.
"""


class QSVError(Exception):
    """Base class for all library errors."""


class PoleError(QSVError, ZeroDivisionError):
    """A denominator factor vanished (or came within the pole margin)."""

    def __init__(self, message, *, index=None, factor=None):
        super().__init__(message)
        self.index = index
        self.factor = factor


class DivergenceError(QSVError, ArithmeticError):
    """A nonterminating sum was requested outside its convergence region."""

    def __init__(self, message, *, index=None):
        super().__init__(message)
        self.index = index


class TruncationError(QSVError, ArithmeticError):
    """The term budget ran out before the tail criterion was met."""

    def __init__(self, message, *, partial=None, terms=None):
        super().__init__(message)
        self.partial = partial
        self.terms = terms


class ConstraintError(QSVError, ValueError):
    """Parameters fall outside the admissible domain of an identity."""
