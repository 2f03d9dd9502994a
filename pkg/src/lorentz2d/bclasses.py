"""Constants and membership verdicts for B_p-type weight classes.

``bp_constant``         sup_r r^p T_p(r) / V(r)
``b1inf_constant``      sup_{s<=r} (V(r)/r) / (V(s)/s)
``b2_product_formula``  (1 + sup a*utilde(a)/U(a)) (1 + sup b*vtilde(b)/V(b))
``b21_staircase_sup``   sup over decreasing sets of int S^2(chi_D) w / w(D)
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .grid import GridError, Staircase
from .staircases import EXHAUSTIVE_LIMIT, ratio_objective, staircase_search
from .weights import IndicatorWeight, PowerWeight, ProductWeight, StepWeight, StepWeight2D, Weight1D, Weight2D


@dataclass
class WeightVerdict:
    constant: float
    member: bool
    method: str
    resolution: str = ""
    conclusive: bool = True
    maximizer: tuple[int, ...] | None = None
    notes: list[str] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @classmethod
    def of(cls, constant: float, method: str, **kw) -> "WeightVerdict":
        return cls(constant, math.isfinite(constant), method, **kw)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["infinite"] = math.isinf(self.constant)
        d["constant"] = None if math.isinf(self.constant) else self.constant
        d["maximizer"] = list(self.maximizer) if self.maximizer is not None else None
        return d


def _leading_zero(v: StepWeight) -> bool:
    vals = v.g.values
    return vals[0] == 0 and bool(np.any(vals > 0))


def bp_ratio(v: Weight1D, p: float, r: float) -> float:
    """``r^p T_p(r) / V(r)``; ``nan`` where ``V(r) = 0``."""
    V = v.V(r)
    if V <= 0:
        return math.nan
    T = v.T(r, p)
    return math.inf if math.isinf(T) else r**p * T / V


def _step_bp(v: StepWeight, p: float, per_cell: int) -> float:
    h, size = v.g.cell_width, v.g.size
    r = [h * 2.0 ** -k for k in range(1, 40)]
    r += list((np.arange(size * per_cell) + 1) * (h / per_cell))
    best = 1.0 / (p - 1)  # limit as r -> 0 when the first cell is positive
    for x in r:
        val = bp_ratio(v, p, float(x))
        if not math.isnan(val):
            best = max(best, val)
    return best


def bp_constant(v: Weight1D, p: float, rtol: float = 1e-3) -> WeightVerdict:
    if not p > 0:
        raise GridError("B_p needs p > 0")
    notes = []
    if p <= 1:
        notes.append("B_p is not the normability condition at p <= 1; use B_{1,oo}")
    if isinstance(v, PowerWeight):
        e = p - v.alpha - 1
        const = (v.alpha + 1) / e if e > 0 else math.inf
        return WeightVerdict.of(const, "closed-form", notes=notes)
    if isinstance(v, IndicatorWeight):
        const = 1.0 / (p - 1) if p > 1 else math.inf
        return WeightVerdict.of(const, "closed-form", notes=notes)
    if isinstance(v, StepWeight):
        vals = v.g.values
        if not np.any(vals > 0):
            return WeightVerdict.of(0.0, "closed-form", notes=notes + ["zero weight"])
        if _leading_zero(v) or p <= 1:
            # V vanishes (or T_p blows up) at the left end while T_p stays positive
            return WeightVerdict.of(math.inf, "closed-form", notes=notes)
        per_cell = 64
        prev = _step_bp(v, p, per_cell)
        while True:
            per_cell *= 2
            cur = _step_bp(v, p, per_cell)
            if abs(cur - prev) <= rtol * cur or per_cell >= 4096:
                return WeightVerdict.of(cur, "grid-sup", resolution=f"{per_cell} samples/cell", notes=notes)
            prev = cur
    raise GridError(f"unsupported weight {v!r}")


def b1inf_constant(v: Weight1D) -> WeightVerdict:
    if isinstance(v, PowerWeight):
        return WeightVerdict.of(1.0 if v.alpha <= 0 else math.inf, "closed-form")
    if isinstance(v, IndicatorWeight):
        return WeightVerdict.of(1.0, "closed-form")
    if isinstance(v, StepWeight):
        vals = v.g.values
        if not np.any(vals > 0):
            return WeightVerdict.of(1.0, "closed-form", notes=["zero weight"])
        if _leading_zero(v):
            return WeightVerdict.of(math.inf, "closed-form")
        if v.is_decreasing:
            return WeightVerdict.of(1.0, "closed-form")
        # V(r)/r is monotone on every cell, so breakpoints (and r -> 0+) suffice
        h = v.g.cell_width
        avg = [float(vals[0])]
        avg += [v.V(k * h) / (k * h) for k in range(1, v.g.size + 1)]
        running_min, best = math.inf, 1.0
        for a in avg:
            running_min = min(running_min, a)
            best = max(best, a / running_min)
        return WeightVerdict.of(best, "grid-sup", resolution="exact at breakpoints")
    raise GridError(f"unsupported weight {v!r}")


def b1_factor(v: Weight1D) -> float:
    """``1 + sup_a a*utilde(a)/V(a)``."""
    if isinstance(v, PowerWeight):
        if v.alpha >= 0:
            return math.inf
        return 1.0 + (v.alpha + 1) / (-v.alpha)
    if isinstance(v, (IndicatorWeight, StepWeight)):
        # utilde grows like log(1/a) at 0 whenever v is positive near 0, and
        # a leading gap makes V vanish while utilde stays positive
        return math.inf
    raise GridError(f"unsupported weight {v!r}")


def b2_product_formula(u: Weight1D, v: Weight1D) -> float:
    fu, fv = b1_factor(u), b1_factor(v)
    if math.isinf(fu) or math.isinf(fv):
        return math.inf
    return fu * fv


# -- staircase sup -----------------------------------------------------------


def s2_indicator_tables(weight: StepWeight2D, hx: float, hy: float, m: int, n: int):
    """Truncated numerator and denominator tables for a step weight.

    ``num[i, k]`` is the integral over the box of ``S^2`` of column ``i`` of
    height ``k`` against ``w``; it is exact because on every grid cell the
    integrand is ``(a0 + a1 s)(b0 + b1 t) / (st)``.
    """
    idx = np.arange(m)
    # S[i, a] = int_{cell a} len_i(s)/s ds
    S = np.zeros((m, m))
    for i in range(m):
        S[i, i] = hx - (i * hx * math.log((i + 1) / i) if i > 0 else 0.0)
        a = idx[idx > i]
        S[i, a] = hx * np.log((a + 1) / a)
    jdx = np.arange(n)
    # Tt[k, b] = int_{cell b} min(t, k*hy)/t dt
    Tt = np.zeros((n + 1, n))
    for k in range(n + 1):
        below = jdx < k
        Tt[k, below] = hy
        above = jdx[~below]
        if k > 0:
            Tt[k, above] = k * hy * np.log((above + 1) / above)
    dens = weight.cell_masses(hx, hy, m, n) / (hx * hy)
    num = S @ dens @ Tt.T
    den = weight.column_table(hx, hy, m, n)
    return num, den


def _product_tables(w: ProductWeight, hx, hy, m, n):
    Ut = np.array([w.u.Utilde(i * hx) for i in range(m + 1)])
    Vt = np.array([w.v.Utilde(k * hy) for k in range(n + 1)])
    num = np.outer(np.diff(Ut), Vt)
    den = w.column_table(hx, hy, m, n)
    return num, den


def b21_staircase_sup(
    w: Weight2D,
    box: tuple[float, float] | None = None,
    cells: tuple[int, int] | None = None,
    seed: int = 0,
    exhaustive_limit: int = EXHAUSTIVE_LIMIT,
) -> WeightVerdict:
    """Sup over grid staircases of ``int S^2(chi_D) w / w(D)``.

    Product weights use ``int S^2(chi_D) uv = int_D utilde vtilde`` (exact, whole
    quadrant).  Step weights integrate only over their own box, so the result
    is a lower bound; the staircase grid defaults to the weight grid and must
    refine it.
    """
    notes: list[str] = []
    if isinstance(w, ProductWeight):
        if box is None or cells is None:
            raise GridError("product weights need box and cells")
        (A, B), (m, n) = box, cells
        hx, hy = A / m, B / n
        if math.isinf(w.u.Utilde(hx)) or math.isinf(w.v.Utilde(hy)):
            return WeightVerdict.of(math.inf, "closed-form", notes=["utilde diverges"])
        num, den = _product_tables(w, hx, hy, m, n)
        lower = False
    elif isinstance(w, StepWeight2D):
        gm, gn = w.grid.shape
        m, n = cells if cells is not None else (gm, gn)
        if m % gm or n % gn:
            raise GridError("staircase cells must refine the step-weight grid")
        if box is not None and not np.allclose(box, w.grid.box):
            raise GridError("box must equal the step-weight box")
        hx, hy = w.grid.hx * gm / m, w.grid.hy * gn / n
        num, den = s2_indicator_tables(w, hx, hy, m, n)
        lower = True
        notes.append("numerator truncated to the weight box: lower bound")
    else:
        raise GridError(f"unsupported 2-d weight {w!r}")
    res = staircase_search(num, den, ratio_objective, exhaustive_limit=exhaustive_limit, seed=seed)
    if res.skipped:
        notes.append(f"skipped {res.skipped} staircases with w(D) = 0")
    if not res.exhaustive:
        notes.append("annealed search: lower bound")
    value = res.value if res.heights is not None else 0.0
    return WeightVerdict(
        value,
        member=math.isfinite(value),
        method=res.method,
        resolution=f"{m}x{n} cells",
        conclusive=False,
        maximizer=res.heights,
        notes=notes,
        details={"lower_bound": lower or not res.exhaustive, "evaluated": res.evaluated},
    )


def staircase_ratio(w: Weight2D, D: Staircase) -> float:
    """``int S^2(chi_D) w / w(D)`` for a single staircase (product weights: exact)."""
    m = D.columns
    n = max(D.heights)
    if isinstance(w, ProductWeight):
        num, den = _product_tables(w, D.hx, D.hy, m, n)
    elif isinstance(w, StepWeight2D):
        num, den = s2_indicator_tables(w, D.hx, D.hy, m, n)
    else:
        raise GridError(f"unsupported 2-d weight {w!r}")
    h = np.array(D.heights)
    a = num[np.arange(m), h].sum()
    b = den[np.arange(m), h].sum()
    return float(a / b) if b > 0 else math.nan


def b2p_membership(w: Weight2D, p: float, box=None, cells=None, seed: int = 0) -> WeightVerdict:
    if not p >= 1:
        raise GridError("B^(2)_p is defined for p >= 1")
    if isinstance(w, ProductWeight):
        if p > 1:
            bu, bv = bp_constant(w.u, p), bp_constant(w.v, p)
            const = max(bu.constant, bv.constant)
            return WeightVerdict.of(
                const,
                "closed-form",
                notes=["member iff both factors are in B_p"],
                details={"bp_u": bu.to_dict(), "bp_v": bv.to_dict()},
            )
        const = b2_product_formula(w.u, w.v)
        notes = ["p = 1: staircase characterisation via the product formula"]
        if math.isinf(const) and b1inf_constant(w.u).member and b1inf_constant(w.v).member:
            notes.append(
                "both factors are in B_{1,oo} yet the product is not in B^(2)_1; "
                "expected at the endpoint (Lambda_2^1 can still be a Banach space)"
            )
        return WeightVerdict.of(const, "closed-form", notes=notes)
    if isinstance(w, StepWeight2D):
        if p != 1:
            raise GridError("step weights: only the p = 1 staircase lower bound is available")
        verdict = b21_staircase_sup(w, box=box, cells=cells, seed=seed)
        verdict.notes.append("step weight: lower bound only, no membership verdict")
        return verdict
    raise GridError(f"unsupported 2-d weight {w!r}")


__all__ = [
    "WeightVerdict",
    "bp_constant",
    "bp_ratio",
    "b1inf_constant",
    "b1_factor",
    "b2_product_formula",
    "b21_staircase_sup",
    "b2p_membership",
    "staircase_ratio",
    "s2_indicator_tables",
]
