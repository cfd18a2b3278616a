"""Shared error taxonomy.

Every failure mode the library promises to callers is a named subclass so the
service layer can map them to status codes without string matching.
"""

from __future__ import annotations


class DpError(Exception):
    """Base class for all errors raised by this package."""


class ParamError(DpError, ValueError):
    """A caller-supplied parameter is outside its allowed range."""


class SchemaMismatch(DpError):
    """CSV header does not match the declared schema columns."""


class ParseError(DpError):
    """A cell failed to parse under the strict ingestion policy."""

    def __init__(self, row: int, column: str, cell: str):
        # row is the 1-based data-row ordinal, header excluded
        self.row = row
        self.column = column
        self.cell = cell
        super().__init__(f"row {row}, column {column!r}: cannot parse {cell!r}")


class DomainError(DpError):
    """A categorical cell is outside the declared domain under strict policy."""

    def __init__(self, row: int, column: str, cell: str):
        self.row = row
        self.column = column
        self.cell = cell
        super().__init__(f"row {row}, column {column!r}: {cell!r} not in domain")


class KindError(DpError):
    """Operation applied to a column of the wrong kind."""


class InsufficientData(DpError):
    """Fewer present cells than an operation needs."""


class EmptyColumn(DpError):
    """A column has zero present values."""


class MissingPrerequisite(DpError):
    """A query needs an earlier release that has not happened."""

    def __init__(self, prerequisite: str, message: str | None = None):
        self.prerequisite = prerequisite
        super().__init__(message or f"requires prior release {prerequisite!r}")


class DegenerateColumn(DpError):
    """A correlation target has too little variation to define the statistic."""


class BudgetExhausted(DpError):
    """A charge was refused; the ledger is unchanged.

    Carries the remaining budget so callers can report how much room is left
    versus what was asked for.
    """

    def __init__(self, requested: float, remaining: float):
        self.requested = requested
        self.remaining = remaining
        super().__init__(
            f"charge of {requested} refused; remaining budget {remaining}"
        )


class TooLarge(DpError):
    """Exhaustive enumeration would exceed the configured evaluation limit."""


class NotFound(DpError):
    """A named dataset, session, or column does not exist."""
