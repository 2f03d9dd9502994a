import math
from itertools import combinations_with_replacement

import numpy as np
import pytest

from lorentz2d.grid import GridError
from lorentz2d.staircases import enumerate_staircases, ratio_objective, staircase_profiles, staircase_search


def relist(m, n):
    """Independent listing: weakly decreasing m-tuples with entries in 0..n."""
    return sorted(tuple(sorted(c, reverse=True)) for c in combinations_with_replacement(range(n + 1), m))


@pytest.mark.parametrize("m,n", [(1, 1), (1, 5), (3, 2), (4, 4), (2, 7), (5, 3)])
def test_profiles_match_relisting(m, n):
    prof = staircase_profiles(m, n)
    assert len(prof) == math.comb(m + n, m)
    assert sorted(map(tuple, prof.tolist())) == relist(m, n)
    assert np.all(np.diff(prof, axis=1) <= 0)


def test_profile_count_at_limit():
    assert len(staircase_profiles(12, 12)) == 2704156


def test_bad_grid():
    with pytest.raises(GridError):
        staircase_profiles(0, 3)


def test_enumerate_yields_staircases():
    shapes = list(enumerate_staircases(2, 2, 0.5, 0.5))
    assert len(shapes) == 6
    assert sum(D.is_empty() for D in shapes) == 1


def _brute(ta, tb, objective):
    m, n1 = ta.shape
    best = -math.inf
    for h in relist(m, n1 - 1):
        a = sum(ta[i, k] for i, k in enumerate(h))
        b = sum(tb[i, k] for i, k in enumerate(h))
        v = objective(np.array([a]), np.array([b]))[0]
        if not math.isnan(v):
            best = max(best, v)
    return best


@pytest.mark.parametrize("seed", range(4))
def test_exhaustive_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    m, n = 4, 5
    ta = np.cumsum(rng.random((m, n + 1)), axis=1)
    tb = np.cumsum(rng.random((m, n + 1)), axis=1)
    ta[:, 0] = tb[:, 0] = 0
    res = staircase_search(ta, tb, ratio_objective)
    assert res.exhaustive
    assert res.value == pytest.approx(_brute(ta, tb, ratio_objective), rel=1e-14)
    assert res.skipped == 1  # the empty set


@pytest.mark.parametrize("seed", range(3))
def test_annealing_is_a_lower_bound_and_reaches_small_optimum(seed):
    rng = np.random.default_rng(seed)
    m, n = 5, 5
    ta = np.cumsum(rng.random((m, n + 1)), axis=1)
    tb = np.cumsum(rng.random((m, n + 1)), axis=1)
    ta[:, 0] = tb[:, 0] = 0
    exact = staircase_search(ta, tb, ratio_objective).value
    ann = staircase_search(ta, tb, ratio_objective, exhaustive_limit=0, seed=seed, steps=3000, restarts=4)
    assert not ann.exhaustive
    assert ann.value <= exact * (1 + 1e-12)
    assert ann.value == pytest.approx(exact, rel=1e-9)
    h = ann.heights
    assert all(a >= b for a, b in zip(h, h[1:]))


def test_annealing_is_seeded():
    rng = np.random.default_rng(0)
    ta = np.cumsum(rng.random((6, 9)), axis=1)
    tb = np.cumsum(rng.random((6, 9)), axis=1)
    a = staircase_search(ta, tb, ratio_objective, exhaustive_limit=0, seed=7, steps=500, restarts=2)
    b = staircase_search(ta, tb, ratio_objective, exhaustive_limit=0, seed=7, steps=500, restarts=2)
    assert a == b
