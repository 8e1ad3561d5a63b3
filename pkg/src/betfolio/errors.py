"""Exception types raised by the betfolio core."""

from __future__ import annotations


class BetfolioError(Exception):
    """Base class for all betfolio-specific errors."""


class WorldLimitExceeded(BetfolioError):
    """Joint outcome enumeration would exceed the configured world limit."""


class ZeroProbability(BetfolioError):
    """A realized outcome carries zero probability where a log-score is needed."""


class NonFiniteObjective(BetfolioError):
    """An accepted solver iterate produced a NaN or infinite objective value."""


class InfeasibleConstraint(BetfolioError):
    """Penalty stages exhausted with the constraint residual still above tolerance."""


class EmptyAmbiguitySet(BetfolioError):
    """Probability box has no intersection with the simplex."""


class SchemaError(BetfolioError):
    """Dataset file does not match the expected column layout."""


class EmptySplit(BetfolioError):
    """A train/test split would leave one side without any rounds."""
