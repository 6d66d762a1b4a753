"""Shared tolerances, limits and exception types."""

import os

# absolute tolerance for every distance comparison in the package
EPS = 1e-9

DEFAULT_BUDGET = 10_000_000


def budget() -> int:
    """Enumeration budget, overridable through the PGH_BUDGET env var."""
    raw = os.environ.get("PGH_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        value = int(float(raw))
    except ValueError:
        raise ValueError(f"PGH_BUDGET must be a number, got {raw!r}") from None
    if value < 1:
        raise ValueError("PGH_BUDGET must be positive")
    return value


def snap(value: float) -> int:
    """Index of `value` on the EPS grid; heights on the same cell are equal."""
    return int(round(value / EPS))


class PGHError(Exception):
    """Base class for domain errors raised by this package."""


class StructureError(PGHError, ValueError):
    """Distance matrix is not a valid metric structure (shape, symmetry, sign, diagonal)."""


class TriangleViolation(PGHError, ValueError):
    """A triple breaks the requested p-triangle inequality."""

    def __init__(self, message, triple=None, slack=None):
        super().__init__(message)
        self.triple = triple
        self.slack = slack


class BudgetExceeded(PGHError, RuntimeError):
    """An enumeration would exceed the configured search budget."""


class InvalidCorrespondence(PGHError, ValueError):
    """A relation fails to cover some point of X or Y."""
