"""Enumeration of decreasing sets on a grid and suprema over them.

A decreasing set on an ``m x n`` grid is a weakly decreasing height profile
``n >= h_0 >= h_1 >= ... >= h_{m-1} >= 0`` (a Young diagram in a box); there
are ``C(m+n, m)`` of them, the empty set included.

The suprema needed elsewhere all have the form ``g(A(D), B(D))`` where
``A`` and ``B`` are additive over columns, so a profile is scored from two
``(m, n+1)`` lookup tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .grid import GridError, Staircase

EXHAUSTIVE_LIMIT = math.comb(24, 12)


def staircase_profiles(m: int, n: int) -> np.ndarray:
    """All profiles as a ``(C(m+n, m), m)`` integer array in lexicographic order."""
    if m < 1 or n < 1:
        raise GridError("staircase grid needs m, n >= 1")
    dtype = np.int16 if n < 2**15 else np.int64
    arr = np.arange(n + 1, dtype=dtype)[:, None]
    for _ in range(m - 1):
        last = arr[:, -1].astype(np.int64)
        counts = last + 1
        base = np.repeat(arr, counts, axis=0)
        # 0..last for each parent row
        offsets = np.repeat(np.cumsum(counts) - counts, counts)
        tail = (np.arange(counts.sum()) - offsets).astype(dtype)
        arr = np.column_stack([base, tail])
    return arr


def enumerate_staircases(m: int, n: int, hx: float = 1.0, hy: float = 1.0) -> Iterator[Staircase]:
    for row in staircase_profiles(m, n):
        yield Staircase(hx, hy, tuple(int(x) for x in row))


def table_sums(table: np.ndarray, profiles: np.ndarray) -> np.ndarray:
    cols = np.arange(profiles.shape[1])
    return table[cols[None, :], profiles].sum(axis=1)


@dataclass
class SearchResult:
    value: float
    heights: tuple[int, ...] | None
    method: str
    evaluated: int
    skipped: int
    exhaustive: bool


Objective = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _exhaustive(table_a, table_b, objective: Objective, chunk: int = 1 << 20) -> SearchResult:
    m, n1 = table_a.shape
    profiles = staircase_profiles(m, n1 - 1)
    best, best_h, skipped = -math.inf, None, 0
    for start in range(0, len(profiles), chunk):
        block = profiles[start : start + chunk]
        vals = objective(table_sums(table_a, block), table_sums(table_b, block))
        bad = np.isnan(vals)
        skipped += int(bad.sum())
        vals = np.where(bad, -np.inf, vals)
        k = int(np.argmax(vals))
        if vals[k] > best:
            best, best_h = float(vals[k]), tuple(int(x) for x in block[k])
    return SearchResult(best, best_h, "staircase-enumeration", len(profiles), skipped, True)


def _anneal(table_a, table_b, objective: Objective, seed: int, steps: int, restarts: int) -> SearchResult:
    m, n1 = table_a.shape
    n = n1 - 1
    rng = np.random.default_rng(seed)
    cols = np.arange(m)

    def score(h):
        a = table_a[cols, h].sum()
        b = table_b[cols, h].sum()
        v = float(objective(np.array([a]), np.array([b]))[0])
        return -math.inf if math.isnan(v) else v

    best, best_h, evaluated = -math.inf, None, 0
    for r in range(restarts):
        h = np.full(m, n) if r == 0 else -np.sort(-rng.integers(0, n + 1, m))
        cur = score(h)
        evaluated += 1
        scale = abs(cur) if math.isfinite(cur) and cur != 0 else 1.0
        for step in range(steps):
            temp = scale * (0.1 * (1 - step / steps) + 1e-4)
            i = int(rng.integers(m))
            new = h[i] + (1 if rng.random() < 0.5 else -1)
            hi = n if i == 0 else h[i - 1]
            lo = 0 if i == m - 1 else h[i + 1]
            if not lo <= new <= hi:
                continue
            old = h[i]
            h[i] = new
            cand = score(h)
            evaluated += 1
            if cand >= cur or (math.isfinite(cand) and rng.random() < math.exp((cand - cur) / temp)):
                cur = cand
                if cur > best:
                    best, best_h = cur, tuple(int(x) for x in h)
            else:
                h[i] = old
        if cur > best:
            best, best_h = cur, tuple(int(x) for x in h)
    return SearchResult(best, best_h, "simulated-annealing", evaluated, 0, False)


def staircase_search(
    table_a: np.ndarray,
    table_b: np.ndarray,
    objective: Objective,
    *,
    exhaustive_limit: int = EXHAUSTIVE_LIMIT,
    seed: int = 0,
    steps: int = 20000,
    restarts: int = 8,
) -> SearchResult:
    """Maximise ``objective(sum A, sum B)`` over all staircases.

    ``objective`` returns NaN for profiles that must be skipped (for example
    a vanishing denominator).  Exhaustive when the profile count is at most
    ``exhaustive_limit``; otherwise simulated annealing, whose result is only
    a lower bound.
    """
    m, n1 = table_a.shape
    if table_b.shape != table_a.shape:
        raise GridError("score tables must have equal shapes")
    if math.comb(m + n1 - 1, m) <= exhaustive_limit:
        return _exhaustive(table_a, table_b, objective)
    return _anneal(table_a, table_b, objective, seed, steps, restarts)


def ratio_objective(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(b > 0, a / np.where(b > 0, b, 1.0), np.nan)
