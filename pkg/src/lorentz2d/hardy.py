"""Hardy-type averaging operators on grid functions.

``s2``          S^2 f(s,t) = (st)^-1 int_0^s int_0^t f
``fstarstar``   f**  = S^2 applied to the yx-rearrangement
``s21``         f**_yx: average in y, rearrange in x, then average in x

All pointwise values are exact for piecewise-constant inputs.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .grid import GridError, GridFunction1D, GridFunction2D, cumulative_integral
from .rearrange import rearrange_y, rearrange_yx

OPERATORS = ("s2", "fstarstar", "s21")


def _desc_primitive(sorted_vals: np.ndarray, h: float, s: np.ndarray) -> np.ndarray:
    """``int_0^s`` of the step function with cell values ``sorted_vals`` (width ``h``)."""
    count = len(sorted_vals)
    prefix = np.concatenate([[0.0], np.cumsum(sorted_vals)]) * h
    x = np.minimum(s, count * h) / h
    idx = np.minimum(np.floor(x).astype(int), count - 1)
    return prefix[idx] + (x - idx) * sorted_vals[idx] * h


def hardy_1d(g: GridFunction1D, t: float) -> float:
    if not t > 0:
        raise GridError("hardy_1d needs t > 0")
    return g.primitive(t) / t


def _check_positive(s: np.ndarray, t: np.ndarray):
    if np.any(s <= 0) or np.any(t <= 0):
        raise GridError("operator evaluation points must be strictly positive")


def s2_values(f: GridFunction2D, s, t) -> np.ndarray:
    s, t = np.broadcast_arrays(np.asarray(s, float), np.asarray(t, float))
    _check_positive(s, t)
    return np.asarray(cumulative_integral(f, s, t)) / (s * t)


def fstarstar_values(f: GridFunction2D, s, t) -> np.ndarray:
    return s2_values(rearrange_yx(f), s, t)


def _row_averages(fy: GridFunction2D, t: float) -> np.ndarray:
    """``(1/t) int_0^t f*_y(x_i, tau) dtau`` for every row ``i``."""
    m, n = fy.shape
    prefix = np.concatenate([np.zeros((m, 1)), np.cumsum(fy.values, axis=1)], axis=1) * fy.hy
    u = min(t, n * fy.hy) / fy.hy
    j = min(int(math.floor(u)), n - 1)
    frac = u - j
    return (prefix[:, j] + frac * fy.values[:, j] * fy.hy) / t


def s21_values(f: GridFunction2D, s, t) -> np.ndarray:
    """Pointwise ``S_{2,1} f``; the x-sort is redone for every distinct ``t``."""
    s, t = np.broadcast_arrays(np.asarray(s, float), np.asarray(t, float))
    _check_positive(s, t)
    fy = rearrange_y(f)
    out = np.empty(s.shape)
    flat_s, flat_t, flat_out = s.ravel(), t.ravel(), out.reshape(-1)
    for tv in np.unique(flat_t):
        sel = flat_t == tv
        h = _row_averages(fy, float(tv))
        h_desc = -np.sort(-h, kind="stable")
        ss = flat_s[sel]
        flat_out[sel] = _desc_primitive(h_desc, f.hx, ss) / ss
    return out


_EVALUATORS = {"s2": s2_values, "fstarstar": fstarstar_values, "s21": s21_values}


def operator_values(op: str, f: GridFunction2D, s, t) -> np.ndarray:
    try:
        fn = _EVALUATORS[op]
    except KeyError:
        raise GridError(f"unknown operator {op!r}; choose from {OPERATORS}") from None
    return fn(f, s, t)


def operator_grid(op: str, f: GridFunction2D, s_vals, t_vals) -> np.ndarray:
    """Values on the tensor grid ``s_vals x t_vals`` (shape ``(len(s), len(t))``)."""
    S, T = np.meshgrid(np.asarray(s_vals, float), np.asarray(t_vals, float), indexing="ij")
    return operator_values(op, f, S, T)


@dataclass
class OperatorSample:
    points: np.ndarray
    values: np.ndarray
    tag: str = ""

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float).reshape(-1, 2)
        self.values = np.asarray(self.values, dtype=float).ravel()
        if len(self.points) != len(self.values):
            raise GridError("points and values differ in length")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["s", "t", "value"])
        for (s, t), v in zip(self.points, self.values):
            w.writerow([repr(float(s)), repr(float(t)), repr(float(v))])
        return buf.getvalue()


def _sample(op: str, f: GridFunction2D, points, tag: str | None) -> OperatorSample:
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    vals = operator_values(op, f, pts[:, 0], pts[:, 1])
    return OperatorSample(pts, vals, tag or op)


def s2(f: GridFunction2D, points, tag: str | None = None) -> OperatorSample:
    return _sample("s2", f, points, tag)


def fstarstar(f: GridFunction2D, points, tag: str | None = None) -> OperatorSample:
    return _sample("fstarstar", f, points, tag)


def s21(f: GridFunction2D, points, tag: str | None = None) -> OperatorSample:
    return _sample("s21", f, points, tag)


def query_midpoints(box: tuple[float, float], cells: tuple[int, int]) -> np.ndarray:
    """Midpoints of an ``m x n`` query grid covering ``[0,a] x [0,b]``."""
    (a, b), (m, n) = box, cells
    s = (np.arange(m) + 0.5) * a / m
    t = (np.arange(n) + 0.5) * b / n
    S, T = np.meshgrid(s, t, indexing="ij")
    return np.column_stack([S.ravel(), T.ravel()])


# -- superlevel sets -------------------------------------------------------


@dataclass
class SuperlevelResult:
    measure: float
    exact: bool
    lower_bound: bool
    tolerance: float = 0.0
    refinement: int = 0
    notes: list[str] = field(default_factory=list)


def rectangle_indicator(f: GridFunction2D) -> tuple[float, float, float, bool] | None:
    """If ``f = c * chi_R`` for a grid rectangle ``R``, return ``(c, width, height, anchored)``."""
    nz = np.argwhere(f.values > 0)
    if len(nz) == 0:
        return None
    (i0, j0), (i1, j1) = nz.min(axis=0), nz.max(axis=0)
    block = f.values[i0 : i1 + 1, j0 : j1 + 1]
    c = float(block[0, 0])
    if np.count_nonzero(f.values) != block.size or not np.all(block == c):
        return None
    width = (i1 - i0 + 1) * f.hx
    height = (j1 - j0 + 1) * f.hy
    return c, width, height, bool(i0 == 0 and j0 == 0)


def s2_indicator_superlevel(lam: float, a: float = 1.0, b: float = 1.0, c: float = 1.0) -> float:
    """Exact ``|{S^2(c chi_[0,a]x[0,b]) > lam}|`` over the whole quadrant.

    With ``x = s/a, y = t/b`` the operator is ``c*min(1,1/x)*min(1,1/y)``; the
    region splits into the unit square, two strips and a hyperbolic corner,
    giving ``ab * (c/lam) * (1 + log(c/lam))`` for ``lam < c``.
    """
    if not lam > 0:
        raise GridError("superlevel measure needs lambda > 0")
    if lam >= c:
        return 0.0
    x = c / lam
    return a * b * x * (1.0 + math.log(x))


def superlevel_measure(
    op: str,
    f: GridFunction2D,
    lam: float,
    box: tuple[float, float] | None = None,
    rtol: float = 5e-3,
    max_refine: int = 128,
) -> SuperlevelResult:
    """Measure of ``{op f > lam}``.

    Rectangle indicators use the exact unbounded-domain formula.  Anything
    else is counted on successively halved midpoint grids of ``box`` (default:
    the support box) until two refinements agree to ``rtol``; such values are
    truncated to ``box`` and flagged as lower bounds.
    """
    if not lam > 0:
        raise GridError("superlevel measure needs lambda > 0")
    if op not in OPERATORS:
        raise GridError(f"unknown operator {op!r}")
    rect = rectangle_indicator(f)
    if rect is not None and (op != "s2" or rect[3]):
        c, a, b, _ = rect
        return SuperlevelResult(s2_indicator_superlevel(lam, a, b, c), exact=True, lower_bound=False)
    if rect is None and not np.any(f.values > 0):
        return SuperlevelResult(0.0, exact=True, lower_bound=False)

    A, B = box if box is not None else f.box
    m = max(1, int(math.ceil(A / f.hx - 1e-9)))
    n = max(1, int(math.ceil(B / f.hy - 1e-9)))
    prev = None
    k = 1
    while True:
        ds, dt = A / (m * k), B / (n * k)
        s_vals = (np.arange(m * k) + 0.5) * ds
        t_vals = (np.arange(n * k) + 0.5) * dt
        vals = operator_grid(op, f, s_vals, t_vals)
        meas = float(np.count_nonzero(vals > lam)) * ds * dt
        if prev is not None:
            change = abs(meas - prev) / max(abs(meas), 1e-300)
            if change < rtol or 2 * k > max_refine:
                notes = [] if change < rtol else [f"refinement cap {k} reached"]
                return SuperlevelResult(meas, exact=False, lower_bound=True,
                                        tolerance=change, refinement=k, notes=notes)
        prev = meas
        k *= 2


def weak_lp_norm(f: GridFunction1D | GridFunction2D, p: float, lambdas=None) -> float:
    """``sup_lambda lambda * |{|f| > lambda}|^(1/p)``.

    With ``lambdas=None`` the supremum is exact: it is approached from below
    at each distinct cell value ``v`` and equals ``v * |{f >= v}|^(1/p)``.
    """
    if not p > 0:
        raise GridError("weak L^p needs p > 0")
    area = f.cell_width if isinstance(f, GridFunction1D) else f.cell_area
    vals = np.asarray(f.values, float).ravel()
    if lambdas is None:
        levels = np.unique(vals[vals > 0])
        if len(levels) == 0:
            return 0.0
        counts = np.array([np.count_nonzero(vals >= v) for v in levels])
        return float(np.max(levels * (counts * area) ** (1.0 / p)))
    lambdas = np.asarray(lambdas, float)
    counts = np.array([np.count_nonzero(vals > lam) for lam in lambdas])
    return float(np.max(lambdas * (counts * area) ** (1.0 / p)))


def weak_lp_operator(op: str, f: GridFunction2D, p: float, lambdas, box=None) -> tuple[float, list[float]]:
    """Running supremum of ``lam * |{op f > lam}|^(1/p)`` along ``lambdas``.

    Returns the final supremum and the running sequence (used to read off
    divergence).
    """
    if not p > 0:
        raise GridError("weak L^p needs p > 0")
    running, best = [], 0.0
    for lam in lambdas:
        res = superlevel_measure(op, f, float(lam), box=box)
        best = max(best, float(lam) * res.measure ** (1.0 / p))
        running.append(best)
    return best, running
