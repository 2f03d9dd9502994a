"""One- and two-dimensional weights with exact integral primitives.

Every 1-d weight ``v`` exposes

* ``V(r)      = int_0^r v``
* ``T(r, p)   = int_r^oo v(x) x^-p dx``  (``math.inf`` when divergent)
* ``utilde(s) = int_s^oo v(x)/x dx``     (that is ``T(s, 1)``)
* ``Utilde(r) = int_0^r utilde = V(r) + r*utilde(r)``

The family is closed (power, indicator, step) so all of these are exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .grid import GridError, GridFunction1D, GridFunction2D, Staircase, load_grid, rect_integral


def _power_integral(x0: float, x1: float, p: float) -> float:
    """``int_{x0}^{x1} x^-p dx`` for ``0 <= x0 <= x1``."""
    if x1 <= x0:
        return 0.0
    if x0 == 0.0 and p >= 1:
        return math.inf
    if p == 1:
        return math.log(x1 / x0)
    return (x1 ** (1 - p) - x0 ** (1 - p)) / (1 - p)


def _check_p(p: float) -> float:
    p = float(p)
    if not p > 0:
        raise GridError(f"exponent must be positive, got {p}")
    return p


class Weight1D:
    """Base class; subclasses implement ``V``, ``T`` and ``density``."""

    def V(self, r: float) -> float:
        raise NotImplementedError

    def T(self, r: float, p: float) -> float:
        raise NotImplementedError

    def density(self, x: float) -> float:
        raise NotImplementedError

    @property
    def is_decreasing(self) -> bool:
        raise NotImplementedError

    def mass(self, a: float, b: float) -> float:
        return self.V(b) - self.V(a)

    def masses(self, edges) -> np.ndarray:
        """Masses of consecutive intervals ``[edges[k], edges[k+1]]``."""
        Vs = np.array([self.V(float(e)) for e in edges])
        return np.diff(Vs)

    def utilde(self, sigma: float) -> float:
        return self.T(sigma, 1.0)

    def Utilde(self, r: float) -> float:
        if r == 0:
            return 0.0
        tail = self.utilde(r)
        if math.isinf(tail):
            return math.inf
        return self.V(r) + r * tail

    def spec(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class PowerWeight(Weight1D):
    """``v(x) = c * x**alpha`` with ``alpha > -1``."""

    c: float = 1.0
    alpha: float = 0.0

    def __post_init__(self):
        if not self.c > 0:
            raise GridError("power weight scale must be positive")
        if not self.alpha > -1:
            raise GridError("power weight needs alpha > -1 for local integrability")

    def V(self, r):
        a1 = self.alpha + 1
        return self.c * r**a1 / a1

    def T(self, r, p):
        p = _check_p(p)
        e = self.alpha - p + 1
        if e >= 0 or r == 0:
            return math.inf
        return self.c * r**e / (-e)

    def density(self, x):
        if x <= 0:
            return math.inf if self.alpha < 0 else (self.c if self.alpha == 0 else 0.0)
        return self.c * x**self.alpha

    @property
    def is_decreasing(self):
        return self.alpha <= 0

    def spec(self):
        if self.alpha == 0:
            return f"const:{self.c:g}"
        return f"power:{self.c:g},{self.alpha:g}"


def constant(c: float = 1.0) -> PowerWeight:
    return PowerWeight(c, 0.0)


@dataclass(frozen=True)
class IndicatorWeight(Weight1D):
    """``v = c * chi_[0, a]``."""

    a: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        if not (self.a > 0 and self.c > 0):
            raise GridError("indicator weight needs a > 0 and c > 0")

    def V(self, r):
        return self.c * min(r, self.a)

    def T(self, r, p):
        p = _check_p(p)
        if r >= self.a:
            return 0.0
        return self.c * _power_integral(r, self.a, p)

    def density(self, x):
        return self.c if 0 <= x < self.a else 0.0

    @property
    def is_decreasing(self):
        return True

    def spec(self):
        if self.c == 1:
            return f"indicator:{self.a:g}"
        return f"indicator:{self.a:g},{self.c:g}"


@dataclass(frozen=True, eq=False)
class StepWeight(Weight1D):
    """Piecewise-constant weight given by a ``GridFunction1D``; zero past its support."""

    g: GridFunction1D
    source: str | None = None

    def V(self, r):
        return self.g.primitive(r)

    def T(self, r, p):
        p = _check_p(p)
        h = self.g.cell_width
        total = 0.0
        for i, val in enumerate(self.g.values):
            x1 = (i + 1) * h
            if val == 0 or x1 <= r:
                continue
            total += val * _power_integral(max(r, i * h), x1, p)
            if math.isinf(total):
                return math.inf
        return total

    def density(self, x):
        return self.g(x)

    @property
    def is_decreasing(self):
        return bool(np.all(np.diff(self.g.values) <= 0))

    @property
    def breakpoints(self) -> np.ndarray:
        return np.arange(self.g.size + 1) * self.g.cell_width

    def spec(self):
        return f"step:{self.source}" if self.source else "step:<inline>"


class Weight2D:
    """Base class for ``w(s, t)``; subclasses provide ``rect_mass``."""

    def rect_mass(self, x0, x1, y0, y1) -> float:
        raise NotImplementedError

    def cell_masses(self, hx: float, hy: float, m: int, n: int) -> np.ndarray:
        """``(m, n)`` array of ``w`` over the cells of an ``hx x hy`` grid."""
        raise NotImplementedError

    def column_table(self, hx: float, hy: float, m: int, n: int) -> np.ndarray:
        """``(m, n+1)`` table: entry ``[i, k]`` is ``w`` of column ``i`` up to height ``k``."""
        cm = self.cell_masses(hx, hy, m, n)
        return np.concatenate([np.zeros((m, 1)), np.cumsum(cm, axis=1)], axis=1)

    def staircase_mass(self, D: Staircase) -> float:
        n = max(D.heights, default=0)
        if n == 0:
            return 0.0
        table = self.column_table(D.hx, D.hy, D.columns, n)
        return float(sum(table[i, k] for i, k in enumerate(D.heights)))


@dataclass(frozen=True)
class ProductWeight(Weight2D):
    """``w(s, t) = u(s) v(t)``."""

    u: Weight1D
    v: Weight1D

    def rect_mass(self, x0, x1, y0, y1):
        return self.u.mass(x0, x1) * self.v.mass(y0, y1)

    def cell_masses(self, hx, hy, m, n):
        du = self.u.masses(np.arange(m + 1) * hx)
        dv = self.v.masses(np.arange(n + 1) * hy)
        return np.outer(du, dv)

    def column_table(self, hx, hy, m, n):
        du = self.u.masses(np.arange(m + 1) * hx)
        Vs = np.array([self.v.V(k * hy) for k in range(n + 1)])
        return np.outer(du, Vs)

    def spec(self):
        return f"{self.u.spec()}*{self.v.spec()}"


@dataclass(frozen=True, eq=False)
class StepWeight2D(Weight2D):
    """Piecewise-constant 2-d weight; zero outside its grid box."""

    grid: GridFunction2D
    source: str | None = None

    def rect_mass(self, x0, x1, y0, y1):
        return float(rect_integral(self.grid, x0, x1, y0, y1))

    def cell_masses(self, hx, hy, m, n):
        xs = np.arange(m + 1) * hx
        ys = np.arange(n + 1) * hy
        X0, Y0 = np.meshgrid(xs[:-1], ys[:-1], indexing="ij")
        X1, Y1 = np.meshgrid(xs[1:], ys[1:], indexing="ij")
        return np.asarray(rect_integral(self.grid, X0, X1, Y0, Y1), dtype=float)

    def spec(self):
        return f"step:{self.source}" if self.source else "step:<inline>"


def unit_weight_2d() -> ProductWeight:
    return ProductWeight(constant(1.0), constant(1.0))


def _floats(body: str, count: tuple[int, ...], spec: str) -> list[float]:
    try:
        vals = [float(x) for x in body.split(",")] if body else []
    except ValueError as exc:
        raise GridError(f"bad numbers in weight spec {spec!r}") from exc
    if len(vals) not in count:
        raise GridError(f"weight spec {spec!r} expects {' or '.join(map(str, count))} numbers")
    return vals


def load_step_1d(path) -> StepWeight:
    try:
        data = json.loads(Path(path).read_text())
        h = data.get("h", data.get("cell_width"))
        g = GridFunction1D(h, data["values"])
    except (OSError, json.JSONDecodeError, KeyError, TypeError, AttributeError) as exc:
        raise GridError(f"cannot read 1-d step weight {path}: {exc}") from exc
    return StepWeight(g, source=str(path))


def parse_weight1d(spec: str) -> Weight1D:
    """Parse ``const:c``, ``power:c,alpha``, ``indicator:a[,c]`` or ``step:<path>``."""
    kind, _, body = spec.strip().partition(":")
    kind = kind.lower()
    if kind == "const":
        (c,) = _floats(body, (1,), spec)
        return constant(c)
    if kind == "power":
        c, alpha = _floats(body, (2,), spec)
        return PowerWeight(c, alpha)
    if kind == "indicator":
        vals = _floats(body, (1, 2), spec)
        return IndicatorWeight(*vals)
    if kind == "step":
        return load_step_1d(body)
    raise GridError(f"unknown weight kind in {spec!r}")


def parse_weight2d(spec: str) -> Weight2D:
    """Parse a 2-d weight: ``u*v`` product of 1-d specs, ``const:c`` or ``step:<grid.json>``."""
    spec = spec.strip()
    if "*" in spec:
        left, right = spec.split("*", 1)
        return ProductWeight(parse_weight1d(left), parse_weight1d(right))
    kind, _, body = spec.partition(":")
    if kind.lower() == "const":
        return ProductWeight(parse_weight1d(spec), constant(1.0))
    if kind.lower() == "step":
        return StepWeight2D(load_grid(body), source=body)
    raise GridError(f"2-d weight spec {spec!r} must be 'u*v', 'const:c' or 'step:<path>'")
