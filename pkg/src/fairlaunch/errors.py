"""Exception types shared across the simulator."""

from __future__ import annotations


class FairLaunchError(Exception):
    """Base class for all simulator errors."""


class ParameterError(FairLaunchError, ValueError):
    """A parameter lies outside its admissible domain."""


class UndefinedMetricError(FairLaunchError, ValueError):
    """A metric is undefined for the given input (e.g. all-zero holdings)."""


class DataLoadError(FairLaunchError, ValueError):
    """An input file is missing or violates its schema.

    ``row`` is the 1-based data row (header excluded) and ``column`` the
    offending column name, when known.
    """

    def __init__(self, message: str, *, path=None, row: int | None = None, column: str | None = None):
        self.path = path
        self.row = row
        self.column = column
        where = []
        if path is not None:
            where.append(str(path))
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column '{column}'")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class InvariantViolation(FairLaunchError, RuntimeError):
    """An internal consistency check failed; indicates a bug, the run is aborted."""
