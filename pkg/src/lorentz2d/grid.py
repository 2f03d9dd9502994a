"""Piecewise-constant grid functions, staircases and exact integration.

A ``GridFunction2D`` holds the value ``values[i, j]`` on the cell
``[i*hx, (i+1)*hx) x [j*hy, (j+1)*hy)`` and vanishes outside the box
``[0, m*hx] x [0, n*hy]``.  The first index is the x/s variable, the second
the y/t variable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class GridError(ValueError):
    """Invalid grid data or an out-of-domain argument."""


def _as_values(values, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise GridError(f"expected a {ndim}-d array of values, got shape {arr.shape}")
    if arr.size == 0:
        raise GridError("grid must contain at least one cell")
    if not np.all(np.isfinite(arr)):
        raise GridError("grid values must be finite")
    if np.any(arr < 0):
        raise GridError("grid values must be nonnegative (pass |f|)")
    arr.setflags(write=False)
    return arr


def _check_width(h, name: str) -> float:
    h = float(h)
    if not (math.isfinite(h) and h > 0):
        raise GridError(f"{name} must be a positive finite number, got {h}")
    return h


@dataclass(frozen=True, eq=False)
class GridFunction1D:
    cell_width: float
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "cell_width", _check_width(self.cell_width, "cell_width"))
        object.__setattr__(self, "values", _as_values(self.values, 1))

    @property
    def size(self) -> int:
        return len(self.values)

    @property
    def length(self) -> float:
        return self.size * self.cell_width

    def total(self) -> float:
        return self.cell_width * float(self.values.sum())

    def primitive(self, r):
        """Exact ``int_0^r g`` for scalar or array ``r >= 0``."""
        r = np.asarray(r, dtype=float)
        if np.any(r < 0):
            raise GridError("integration bound must be nonnegative")
        prefix = np.concatenate([[0.0], np.cumsum(self.values)]) * self.cell_width
        x = np.minimum(r, self.length) / self.cell_width
        idx = np.minimum(np.floor(x).astype(int), self.size - 1)
        frac = x - idx
        out = prefix[idx] + frac * self.values[idx] * self.cell_width
        return float(out) if out.ndim == 0 else out

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.floor(x / self.cell_width).astype(int)
        inside = (x >= 0) & (idx < self.size)
        out = np.where(inside, self.values[np.clip(idx, 0, self.size - 1)], 0.0)
        return float(out) if out.ndim == 0 else out

    def __repr__(self):
        return f"GridFunction1D(h={self.cell_width}, values={self.values.tolist()})"


@dataclass(frozen=True, eq=False)
class GridFunction2D:
    hx: float
    hy: float
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "hx", _check_width(self.hx, "hx"))
        object.__setattr__(self, "hy", _check_width(self.hy, "hy"))
        object.__setattr__(self, "values", _as_values(self.values, 2))

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def cell_area(self) -> float:
        return self.hx * self.hy

    @property
    def box(self) -> tuple[float, float]:
        m, n = self.shape
        return m * self.hx, n * self.hy

    def total(self) -> float:
        return self.cell_area * float(self.values.sum())

    def with_values(self, values) -> "GridFunction2D":
        return GridFunction2D(self.hx, self.hy, values)

    def scaled(self, c: float) -> "GridFunction2D":
        return self.with_values(c * self.values)

    def __add__(self, other: "GridFunction2D") -> "GridFunction2D":
        if not isinstance(other, GridFunction2D):
            return NotImplemented
        if (self.hx, self.hy, self.shape) != (other.hx, other.hy, other.shape):
            raise GridError("cellwise sum needs identical grids")
        return self.with_values(self.values + other.values)

    def flatten(self) -> GridFunction1D:
        """All cells laid end to end on a 1-d grid of width ``hx*hy``."""
        return GridFunction1D(self.cell_area, self.values.ravel())

    def midpoints(self) -> np.ndarray:
        """Cell midpoints as an ``(m*n, 2)`` array, row-major."""
        m, n = self.shape
        s = (np.arange(m) + 0.5) * self.hx
        t = (np.arange(n) + 0.5) * self.hy
        S, T = np.meshgrid(s, t, indexing="ij")
        return np.column_stack([S.ravel(), T.ravel()])

    def is_doubly_decreasing(self) -> bool:
        v = self.values
        return bool(np.all(np.diff(v, axis=0) <= 0) and np.all(np.diff(v, axis=1) <= 0))

    def to_dict(self) -> dict:
        return {"hx": self.hx, "hy": self.hy, "values": self.values.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "GridFunction2D":
        try:
            return cls(data["hx"], data["hy"], data["values"])
        except (KeyError, TypeError) as exc:
            raise GridError(f"malformed grid JSON: {exc}") from exc

    def __repr__(self):
        return f"GridFunction2D(hx={self.hx}, hy={self.hy}, values={self.values.tolist()})"


def load_grid(path) -> GridFunction2D:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise GridError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise GridError(f"{path}: grid JSON must be an object")
    return GridFunction2D.from_dict(data)


def save_grid(f: GridFunction2D, path) -> None:
    Path(path).write_text(json.dumps(f.to_dict()) + "\n")


def _prefix_table(f: GridFunction2D) -> np.ndarray:
    m, n = f.shape
    P = np.zeros((m + 1, n + 1))
    P[1:, 1:] = np.cumsum(np.cumsum(f.values, axis=0), axis=1) * f.cell_area
    return P


def _locate(x: np.ndarray, h: float, count: int):
    u = np.minimum(x, count * h) / h
    idx = np.minimum(np.floor(u).astype(int), count - 1)
    return idx, u - idx


def cumulative_integral(f: GridFunction2D, s, t):
    """Exact ``int_0^s int_0^t f`` by bilinear interpolation of corner prefix sums.

    ``s`` and ``t`` broadcast against each other.
    """
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(s < 0) or np.any(t < 0):
        raise GridError("cumulative_integral needs s, t >= 0")
    s, t = np.broadcast_arrays(s, t)
    m, n = f.shape
    P = _prefix_table(f)
    i, a = _locate(s, f.hx, m)
    j, b = _locate(t, f.hy, n)
    out = (
        (1 - a) * (1 - b) * P[i, j]
        + a * (1 - b) * P[i + 1, j]
        + (1 - a) * b * P[i, j + 1]
        + a * b * P[i + 1, j + 1]
    )
    return float(out) if out.ndim == 0 else out


def rect_integral(f: GridFunction2D, x0, x1, y0, y1):
    """Exact integral of ``f`` over ``[x0, x1] x [y0, y1]``."""
    C = cumulative_integral
    return C(f, x1, y1) - C(f, x0, y1) - C(f, x1, y0) + C(f, x0, y0)


@dataclass(frozen=True)
class Staircase:
    """A decreasing set on the grid: column ``i`` covers ``[0, heights[i]*hy)``."""

    hx: float
    hy: float
    heights: tuple[int, ...]

    def __post_init__(self):
        _check_width(self.hx, "hx")
        _check_width(self.hy, "hy")
        h = tuple(int(x) for x in self.heights)
        if any(x < 0 for x in h):
            raise GridError("staircase heights must be nonnegative")
        if any(a < b for a, b in zip(h, h[1:])):
            raise GridError(f"staircase heights must be weakly decreasing: {h}")
        object.__setattr__(self, "heights", h)

    @property
    def columns(self) -> int:
        return len(self.heights)

    @property
    def cells(self) -> int:
        return sum(self.heights)

    @property
    def measure(self) -> float:
        return self.hx * self.hy * self.cells

    def is_empty(self) -> bool:
        return self.cells == 0

    def padded(self, m: int) -> tuple[int, ...]:
        if m < self.columns:
            raise GridError("cannot pad to fewer columns")
        return self.heights + (0,) * (m - self.columns)

    def mask(self, n: int | None = None) -> np.ndarray:
        """Boolean cell mask of shape ``(columns, n)``."""
        n = max(self.heights, default=0) if n is None else n
        return np.arange(n)[None, :] < np.array(self.heights)[:, None]

    def indicator(self, n: int | None = None, value: float = 1.0) -> GridFunction2D:
        return GridFunction2D(self.hx, self.hy, value * self.mask(n).astype(float))

    def contains(self, other: "Staircase") -> bool:
        m = max(self.columns, other.columns)
        return all(a >= b for a, b in zip(self.padded(m), other.padded(m)))


def staircase_measure_and_weight(D: Staircase, w) -> tuple[float, float]:
    """Return ``(|D|, w(D))`` for a ``Weight2D`` ``w``; both exact."""
    return D.measure, w.staircase_mass(D)


@dataclass(frozen=True)
class Exponents:
    p: float
    q: float

    def __post_init__(self):
        if not (self.p > 0 and self.q > 0):
            raise GridError("exponents must be positive")

    @property
    def r(self) -> float:
        """``pq/(p-q)``; only defined for ``p > q``."""
        if not self.p > self.q:
            raise GridError("r = pq/(p-q) needs p > q")
        return self.p * self.q / (self.p - self.q)
