"""Embedding constants between Lambda^p(R^2, u) and Lambda_2^q(w).

For ``p <= q`` the best constants are suprema over decreasing sets, computed
here over grid staircases.  For ``p > q`` only the covering-family functionals
and level-set integrals are evaluated; the "for all families" quantifier is
explored stochastically, never proved.
"""

from __future__ import annotations

import json
import logging
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import integrate

from .grid import Exponents, GridError, GridFunction2D, Staircase
from .norms import lambda2_norm, lambda_norm
from .staircases import EXHAUSTIVE_LIMIT, enumerate_staircases, staircase_search
from .weights import Weight1D, Weight2D

log = logging.getLogger(__name__)

__all__ = [
    "CoveringFamily",
    "EmbeddingReport",
    "CheckReport",
    "enumerate_staircases",
    "embed_const_forward",
    "embed_const_reverse",
    "embedding_inequality_check",
    "random_decreasing_function",
    "covering_functionals_jl1",
    "covering_functionals_jl2",
    "level_family",
    "level_integral_jl",
    "level_integral_search",
]


@dataclass
class EmbeddingReport:
    constant: float
    maximizer: tuple[int, ...] | None
    direction: str
    p: float
    q: float
    r: float | None = None
    method: str = ""
    box: tuple[float, float] = (0.0, 0.0)
    cells: tuple[int, int] = (0, 0)
    skipped: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def cell_size(self) -> tuple[float, float]:
        return self.box[0] / self.cells[0], self.box[1] / self.cells[1]

    def maximizer_staircase(self) -> Staircase:
        hx, hy = self.cell_size
        return Staircase(hx, hy, self.maximizer)

    def to_dict(self) -> dict:
        return {
            "constant": None if math.isinf(self.constant) else self.constant,
            "infinite": math.isinf(self.constant),
            "maximizer": list(self.maximizer) if self.maximizer else None,
            "direction": self.direction,
            "p": self.p,
            "q": self.q,
            "r": self.r,
            "method": self.method,
            "box": list(self.box),
            "cells": list(self.cells),
            "skipped": self.skipped,
            "notes": self.notes,
        }


def _embedding_tables(u: Weight1D, w: Weight2D, box, cells):
    (A, B), (m, n) = box, cells
    hx, hy = A / m, B / n
    wt = w.column_table(hx, hy, m, n)
    area = np.tile(np.arange(n + 1) * (hx * hy), (m, 1))
    Uvec = np.vectorize(u.V, otypes=[float])
    return wt, area, Uvec


def _embed(direction, u, w, p, q, box, cells, seed, exhaustive_limit) -> EmbeddingReport:
    if not (0 < p <= q):
        raise GridError("these embedding constants need 0 < p <= q")
    wt, area, Uvec = _embedding_tables(u, w, box, cells)

    if direction == "forward":
        def objective(wsum, asum):
            U = Uvec(asum)
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(U > 0, wsum ** (1 / q) / np.where(U > 0, U, 1.0) ** (1 / p), np.nan)
    else:
        def objective(wsum, asum):
            U = Uvec(asum)
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(wsum > 0, U ** (1 / q) / np.where(wsum > 0, wsum, 1.0) ** (1 / p), np.nan)

    res = staircase_search(wt, area, objective, exhaustive_limit=exhaustive_limit, seed=seed)
    notes = []
    if res.skipped:
        what = "U(|D|) = 0" if direction == "forward" else "w(D) = 0"
        # the empty set is always among the skipped profiles
        if res.skipped > 1:
            warnings.warn(f"skipped {res.skipped - 1} nonempty staircases with {what}", stacklevel=3)
        notes.append(f"skipped {res.skipped} staircases with {what} (empty set included)")
    if not res.exhaustive:
        notes.append("annealed search: lower bound")
    return EmbeddingReport(
        res.value if res.heights is not None else 0.0,
        res.heights,
        direction,
        p,
        q,
        method=res.method,
        box=tuple(box),
        cells=tuple(cells),
        skipped=res.skipped,
        notes=notes,
    )


def embed_const_forward(u, w, p, q, box, cells, seed=0, exhaustive_limit=EXHAUSTIVE_LIMIT) -> EmbeddingReport:
    """Best constant of ``||f||_{Lambda_2^q(w)} <= C ||f||_{Lambda^p(u)}`` over grid staircases."""
    return _embed("forward", u, w, p, q, box, cells, seed, exhaustive_limit)


def embed_const_reverse(u, w, p, q, box, cells, seed=0, exhaustive_limit=EXHAUSTIVE_LIMIT) -> EmbeddingReport:
    """Best constant of ``||f||_{Lambda^q(u)} <= C ||f||_{Lambda_2^p(w)}`` over grid staircases."""
    return _embed("reverse", u, w, p, q, box, cells, seed, exhaustive_limit)


def random_decreasing_function(rng, hx, hy, m, n, max_levels: int = 5) -> GridFunction2D:
    """Positive combination of at most ``max_levels`` nested staircase indicators."""
    k = int(rng.integers(1, max_levels + 1))
    profiles = [-np.sort(-rng.integers(0, n + 1, m)) for _ in range(k)]
    vals = np.zeros((m, n))
    running = np.zeros(m, dtype=int)
    for prof in profiles:
        running = np.maximum(running, prof)
        vals += rng.uniform(0.1, 2.0) * (np.arange(n)[None, :] < running[:, None])
    return GridFunction2D(hx, hy, vals)


@dataclass
class CheckReport:
    passed: bool
    trials: int
    max_ratio: float
    constant: float
    tight_ratio: float | None = None
    failures: int = 0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def embedding_ratio(direction, f: GridFunction2D, u, w, p, q) -> float:
    """``||f||_{Lambda_2^q(w)} / ||f||_{Lambda^p(u)}`` (forward) or the reverse pair."""
    if direction == "forward":
        lhs, rhs = lambda2_norm(f, w, q), lambda_norm(f, u, p)
    else:
        lhs, rhs = lambda_norm(f, u, q), lambda2_norm(f, w, p)
    if rhs == 0:
        return 0.0 if lhs == 0 else math.inf
    return lhs / rhs


def embedding_inequality_check(
    direction: str,
    u: Weight1D,
    w: Weight2D,
    p: float,
    q: float,
    C: float,
    box,
    cells,
    trials: int = 100,
    seed: int = 0,
    maximizer: tuple[int, ...] | None = None,
    rtol: float = 1e-9,
) -> CheckReport:
    """Test the embedding inequality with constant ``C`` on random decreasing functions.

    When ``maximizer`` is given, the ratio at its indicator is returned as
    ``tight_ratio`` (it should equal ``C``).
    """
    (A, B), (m, n) = box, cells
    hx, hy = A / m, B / n
    rng = np.random.default_rng(seed)
    worst, failures = 0.0, 0
    for _ in range(trials):
        f = random_decreasing_function(rng, hx, hy, m, n)
        ratio = embedding_ratio(direction, f, u, w, p, q)
        worst = max(worst, ratio)
        if ratio > C * (1 + rtol):
            failures += 1
    tight = None
    if maximizer is not None:
        chi = Staircase(hx, hy, maximizer).indicator(n)
        tight = embedding_ratio(direction, chi, u, w, p, q)
    return CheckReport(failures == 0, trials, worst, C, tight, failures)


# -- covering families --------------------------------------------------------


@dataclass(frozen=True)
class CoveringFamily:
    """Strictly increasing chain of staircases ending at the full ``m x n`` box."""

    hx: float
    hy: float
    members: tuple[Staircase, ...]

    def __post_init__(self):
        if len(self.members) < 2:
            raise GridError("a covering family needs at least two members")
        m = self.members[-1].columns
        full = self.members[-1].heights
        if len(set(full)) != 1 or full[0] == 0:
            raise GridError("last member must be the full box")
        for a, b in zip(self.members, self.members[1:]):
            if a.columns > m or not b.contains(a) or a.padded(m) == b.padded(m):
                raise GridError("covering family must be strictly increasing")

    @property
    def cells(self) -> tuple[int, int]:
        last = self.members[-1]
        return last.columns, last.heights[0]

    @classmethod
    def from_heights(cls, heights, hx: float = 1.0, hy: float = 1.0) -> "CoveringFamily":
        m = max(len(h) for h in heights)
        members = tuple(Staircase(hx, hy, tuple(h) + (0,) * (m - len(h))) for h in heights)
        return cls(hx, hy, members)

    @classmethod
    def from_json(cls, path) -> "CoveringFamily":
        try:
            data = json.loads(Path(path).read_text())
            return cls.from_heights(data["heights"], data.get("hx", 1.0), data.get("hy", 1.0))
        except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
            raise GridError(f"cannot read covering family {path}: {exc}") from exc

    def masses(self, u: Weight1D, w: Weight2D):
        """``(U(|D_k|), w(D_k))`` for every member."""
        U = np.array([u.V(D.measure) for D in self.members])
        W = np.array([w.staircase_mass(D) for D in self.members])
        return U, W


def _quad01(fn) -> float:
    val, _ = integrate.quad(fn, 0.0, 1.0, epsabs=0.0, epsrel=1e-10, limit=200)
    return float(val)


def _skip(msg):
    warnings.warn(msg, stacklevel=3)
    log.warning(msg)


def covering_functionals_jl1(family: CoveringFamily, u: Weight1D, w: Weight2D, p: float, q: float):
    """``(I2, I3)`` for the embedding ``Lambda^p(u) -> Lambda_2^q(w)`` with ``q < p``."""
    r = Exponents(p, q).r
    U, W = family.masses(u, w)
    I2 = I3 = 0.0
    for k in range(len(U) - 1):
        dW, dU = W[k + 1] - W[k], U[k + 1] - U[k]
        if U[k + 1] <= 0:
            _skip(f"term {k}: U(|D_k+1|) = 0, skipped")
            continue
        I3 += dW ** (r / q) * U[k + 1] ** (-r / p)
        if dW > 0:
            a, b, c, d = W[k], dW, U[k], dU
            I2 += dW * _quad01(lambda t: ((a + b * t) / (c + d * t)) ** (r / p))
    return I2, I3


def covering_functionals_jl2(family: CoveringFamily, u: Weight1D, w: Weight2D, p: float, q: float):
    """``(J2, J3)`` for the converse embedding ``Lambda_2^p(w) -> Lambda^q(u)``."""
    r = Exponents(p, q).r
    U, W = family.masses(u, w)
    J2 = J3 = 0.0
    for k in range(len(U) - 1):
        dW, dU = W[k + 1] - W[k], U[k + 1] - U[k]
        if W[k + 1] <= 0:
            _skip(f"term {k}: w(D_k+1) = 0, skipped")
            continue
        J3 += W[k + 1] ** (-r / p) * dU ** (r / q)
        if dU > 0:
            a, b, c, d = U[k], dU, W[k], dW
            J2 += dU * _quad01(lambda t: ((a + b * t) / (c + d * t)) ** (r / p))
    return J2, J3


def _levels(f: GridFunction2D):
    if not f.is_doubly_decreasing():
        raise GridError("level sets need f decreasing in both variables")
    levels = np.unique(f.values[f.values > 0])[::-1]
    sets = [Staircase(f.hx, f.hy, tuple(int(x) for x in np.count_nonzero(f.values >= t, axis=1)))
            for t in levels]
    return levels, sets


def level_family(f: GridFunction2D) -> CoveringFamily:
    """Empty set, the closed level sets ``{f >= t_i}`` by decreasing ``t_i``, then the box."""
    m, n = f.shape
    _, sets = _levels(f)
    members = [Staircase(f.hx, f.hy, (0,) * m)] + sets
    full = Staircase(f.hx, f.hy, (n,) * m)
    if members[-1] != full:
        members.append(full)
    return CoveringFamily(f.hx, f.hy, tuple(members))


def level_integral_jl(f: GridFunction2D, u: Weight1D, w: Weight2D, p: float, q: float,
                      direction: str = "forward") -> float:
    """Stieltjes integral over the level sets of a doubly decreasing ``f``.

    With distinct values ``t_1 > t_2 > ...`` and ``D_i = {f >= t_i}``, the jump
    at ``t_i`` is weighted by the integrand on ``D_i``:

    forward: ``sum_i U(|D_i|)^(-r/p) (w(D_i)^(r/q) - w(D_{i-1})^(r/q))``
    reverse: ``sum_i w(D_i)^(-r/p) (U(|D_i|)^(r/q) - U(|D_{i-1}|)^(r/q))``
    """
    r = Exponents(p, q).r
    _, sets = _levels(f)
    total, prev_U, prev_W = 0.0, 0.0, 0.0
    for D in sets:
        U, W = u.V(D.measure), w.staircase_mass(D)
        if direction == "forward":
            jump = W ** (r / q) - prev_W ** (r / q)
            if jump > 0:
                total += (math.inf if U <= 0 else U ** (-r / p) * jump)
        elif direction == "reverse":
            jump = U ** (r / q) - prev_U ** (r / q)
            if jump > 0:
                total += (math.inf if W <= 0 else W ** (-r / p) * jump)
        else:
            raise GridError("direction must be 'forward' or 'reverse'")
        prev_U, prev_W = U, W
    return total


def level_integral_search(u, w, p, q, box, cells, direction="forward", trials=200, seed=0,
                          max_levels: int = 3) -> tuple[float, GridFunction2D | None]:
    """Largest level integral over random 1..``max_levels``-level decreasing functions.

    Only a stochastic lower bound for the constant in the level-set condition.
    """
    (A, B), (m, n) = box, cells
    rng = np.random.default_rng(seed)
    best, arg = 0.0, None
    for _ in range(trials):
        f = random_decreasing_function(rng, A / m, B / n, m, n, max_levels=max_levels)
        if not np.any(f.values > 0):
            continue
        val = level_integral_jl(f, u, w, p, q, direction)
        if val > best:
            best, arg = val, f
    return best, arg

