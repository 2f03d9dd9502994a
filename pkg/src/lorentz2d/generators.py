"""Built-in grid functions used by the CLI and the verification suite."""

from __future__ import annotations

import numpy as np

from .grid import GridError, GridFunction2D

EXAMPLES = ("r25i", "r25ii", "prop21-witness", "unit-square", "hardy-witness")


def coefficients(N: int, rule: str = "harmonic", p: float = 1.0) -> np.ndarray:
    """``a_k`` for ``k < N``: ``harmonic`` is ``(1+k)^(-1/p)``, ``geometric`` is ``2^-k``."""
    k = np.arange(N, dtype=float)
    if rule == "harmonic":
        return (1.0 + k) ** (-1.0 / p)
    if rule == "geometric":
        return 2.0**-k
    raise GridError(f"unknown coefficient rule {rule!r}")


def staircase_blocks(N: int, p: float = 1.0, rule: str = "harmonic") -> GridFunction2D:
    """``a_k`` on ``(k, k+1) x (0, k+1)`` for ``k < N`` (unit cells)."""
    a = coefficients(N, rule, p)
    vals = np.where(np.arange(N)[None, :] <= np.arange(N)[:, None], a[:, None], 0.0)
    return GridFunction2D(1.0, 1.0, vals)


def diagonal_blocks(N: int, p: float = 1.0, rule: str = "geometric") -> GridFunction2D:
    """``a_k`` on the unit square ``[k, k+1]^2`` for ``k < N``."""
    return GridFunction2D(1.0, 1.0, np.diag(coefficients(N, rule, p)))


def rectangle_union() -> GridFunction2D:
    """Indicator of ``[0,3]x[0,1] U [2,3]x[1,2]`` on a 3x2 unit grid."""
    return GridFunction2D(1.0, 1.0, [[1, 0], [1, 0], [1, 1]])


def unit_square() -> GridFunction2D:
    return GridFunction2D(1.0, 1.0, [[1.0]])


def hardy_witness() -> GridFunction2D:
    return GridFunction2D(1.0, 1.0, [[4, 1], [3, 2]])


def build(name: str, N: int = 4, p: float = 1.0, rule: str | None = None) -> GridFunction2D:
    if name == "r25i":
        return staircase_blocks(N, p, rule or "harmonic")
    if name == "r25ii":
        return diagonal_blocks(N, p, rule or "geometric")
    if name == "prop21-witness":
        return rectangle_union()
    if name == "unit-square":
        return unit_square()
    if name == "hardy-witness":
        return hardy_witness()
    raise GridError(f"unknown example {name!r}; choose from {EXAMPLES}")
