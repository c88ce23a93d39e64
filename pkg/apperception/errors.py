"""Exception hierarchy shared by every module."""

from typing import Any, Optional


class ApperceptionError(Exception):
    """Base class for engine errors."""


class InvalidInputError(ApperceptionError, ValueError):
    """Malformed files, invalid signatures or tasks, bad masks."""


class ResourceLimitError(ApperceptionError):
    """A trace ran past the configured state cap before repeating."""


class BudgetExhausted(ApperceptionError):
    """Search stopped on its node or time limit.

    `best` holds the best theory found before the limit hit, if any.
    """

    def __init__(self, message: str, best: Optional[Any] = None, nodes: int = 0):
        super().__init__(message)
        self.best = best
        self.nodes = nodes
