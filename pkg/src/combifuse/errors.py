"""Exception types shared across the package."""

from __future__ import annotations


class CombifuseError(Exception):
    """Base class for all combifuse errors."""


class NotFoundError(CombifuseError):
    """A referenced system, class, or source does not exist."""


class InvalidScoreError(CombifuseError):
    """A score vector contains NaN/inf or an otherwise unusable value."""


class DomainMismatchError(CombifuseError):
    """Two inputs that must share an item/rank domain do not."""


class DegenerateDomainError(CombifuseError):
    """The rank domain is too small for the requested computation."""


class DegenerateWeightsError(CombifuseError):
    """A weighting scheme collapses (zero total weight, zero divisor)."""


class UnsupportedInputError(CombifuseError):
    """An input lacks the structure the operation requires."""


class EmptyPoolError(CombifuseError):
    """A model pool that must contain at least one entry is empty."""


class SchemaError(CombifuseError):
    """An input file does not match the expected column layout."""

    def __init__(self, message: str, column: str | None = None):
        super().__init__(message)
        self.column = column


class ParseError(CombifuseError):
    """A cell in an input file could not be parsed."""

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        super().__init__(message)
        self.row = row
        self.column = column


class DuplicateItemError(CombifuseError):
    """The same item identifier appears more than once."""
