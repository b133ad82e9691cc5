"""Exception types raised across the engine."""


class TextRewardError(Exception):
    """Base class for every error this package raises on purpose."""


class InvalidInputError(TextRewardError, ValueError):
    """Input violates a documented precondition."""


class AlignmentError(InvalidInputError):
    """Two score vectors do not cover the same record ids."""

    def __init__(self, message, missing_left=(), missing_right=()):
        super().__init__(message)
        self.missing_left = sorted(missing_left)
        self.missing_right = sorted(missing_right)


class UndefinedStatisticError(InvalidInputError):
    """The requested statistic has no defined value on this input."""


class MissingReferenceError(InvalidInputError):
    """A record lacks a reference required by the requested operation."""


class MissingScoreError(InvalidInputError):
    """A precomputed score lookup failed."""
