"""Distribution functions and decreasing rearrangements on uniform grids.

On uniform cells every rearrangement is a stable descending sort, so all
results here are exact.
"""

from __future__ import annotations

import numpy as np

from .grid import GridError, GridFunction1D, GridFunction2D


def _sort_desc(values: np.ndarray, axis: int) -> np.ndarray:
    # stable sort of the negated values keeps ties in index order
    return -np.sort(-values, axis=axis, kind="stable")


def distribution(f: GridFunction1D | GridFunction2D, sigma: float) -> float:
    """Measure of ``{|f| > sigma}``."""
    if sigma < 0:
        raise GridError("distribution needs sigma >= 0")
    if isinstance(f, GridFunction1D):
        area = f.cell_width
    else:
        area = f.cell_area
    return int(np.count_nonzero(f.values > sigma)) * area


def rearrange_1d(g: GridFunction1D) -> GridFunction1D:
    return GridFunction1D(g.cell_width, _sort_desc(g.values, 0))


def rearrange_y(f: GridFunction2D) -> GridFunction2D:
    """Sort each x-row descending in y."""
    return f.with_values(_sort_desc(f.values, 1))


def rearrange_x(f: GridFunction2D) -> GridFunction2D:
    """Sort each y-column descending in x."""
    return f.with_values(_sort_desc(f.values, 0))


def rearrange_yx(f: GridFunction2D) -> GridFunction2D:
    """First in y, then in x; the result is decreasing in both indices."""
    return rearrange_x(rearrange_y(f))


def rearrange_xy(f: GridFunction2D) -> GridFunction2D:
    return rearrange_y(rearrange_x(f))


def rearrange_global(f: GridFunction2D) -> GridFunction1D:
    """The one-variable rearrangement ``f*`` of a 2-d function (cell width ``hx*hy``)."""
    return rearrange_1d(f.flatten())


def equimeasurable(f: GridFunction2D, g: GridFunction2D, rtol: float = 1e-12) -> bool:
    """True iff ``f`` and ``g`` have the same distribution function.

    Only the cell area has to agree; grid shapes may differ because zero
    cells do not contribute to ``{|f| > sigma}`` for ``sigma >= 0``.
    """
    if not np.isclose(f.cell_area, g.cell_area, rtol=1e-12, atol=0):
        raise GridError("equimeasurable needs equal cell areas")
    a = _sort_desc(f.values[f.values > 0], 0)
    b = _sort_desc(g.values[g.values > 0], 0)
    if a.shape != b.shape:
        return False
    scale = max(float(a.max(initial=0.0)), float(b.max(initial=0.0)), 1e-300)
    return bool(np.all(np.abs(a - b) <= rtol * scale))
