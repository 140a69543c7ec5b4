"""The per-line change constant and its inverse."""

from __future__ import annotations

# results of the inverse are rounded to this many decimals; a constant is
# only trusted to about nine significant digits, so finer digits are noise
INVERSE_DECIMALS = 9


class UndefinedInput(ValueError):
    """The constant is undefined for zero changes."""


def change_constant(similarity: float, changes: int) -> float:
    """Dissimilarity per changed line: ``(100 - S) / (n * 100)``.

    >>> change_constant(55, 20)
    0.0225
    """
    if changes < 1:
        raise UndefinedInput("change count must be at least 1")
    if not 0 <= similarity <= 100:
        raise ValueError(f"similarity {similarity} outside [0, 100]")
    return (100 - similarity) / (changes * 100)


def similarity_from_constant(constant: float, changes: int) -> float:
    """Inverse of :func:`change_constant`: ``S = 100 - C * n * 100``."""
    if changes < 1:
        raise UndefinedInput("change count must be at least 1")
    drop = constant * changes * 100
    if constant < 0 or drop > 100 + 1e-9:
        raise ValueError(f"constant {constant} with {changes} changes leaves similarity below 0")
    return max(0.0, round(100 - drop, INVERSE_DECIMALS))
