"""Exception hierarchy shared by all modules."""


class HardyError(Exception):
    """Base class for every error raised by this package."""


class DomainError(HardyError, ValueError):
    """An input lies outside the domain of an operation."""


class InfeasibleError(HardyError, ValueError):
    """The Hardy constraint system has no physical solution for the inputs."""


class NormalizationError(HardyError, ValueError):
    """An amplitude or probability table is not normalized."""


class UndefinedCorrelationError(HardyError, ZeroDivisionError):
    """A normalised correlation was requested for a table with no detection mass."""


class SingularPointError(HardyError, ZeroDivisionError):
    """Evaluation at a point where only a limiting value exists.

    ``supremum`` carries the limiting value approached near the point.
    """

    def __init__(self, message, supremum):
        super().__init__(message)
        self.supremum = supremum


class NoInteractionError(HardyError, ValueError):
    """The object is perfectly transparent, so nothing can be located."""


class ClassificationUnsupportedError(HardyError, ValueError):
    """Event classification requested outside the dark-fringe configuration."""


class InsufficientDataError(HardyError, ValueError):
    """Not enough events to form an estimate."""


class CoverageError(InsufficientDataError):
    """An event log does not cover every required setting pair."""
