import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import grids, riemann_integral
from lorentz2d import Exponents, GridError, GridFunction1D, GridFunction2D, Staircase, cumulative_integral, load_grid, save_grid
from lorentz2d.grid import rect_integral


def test_rejects_negative_and_nonfinite():
    with pytest.raises(GridError):
        GridFunction2D(1, 1, [[1, -1]])
    with pytest.raises(GridError):
        GridFunction2D(1, 1, [[1, np.nan]])
    with pytest.raises(GridError):
        GridFunction2D(0, 1, [[1]])
    with pytest.raises(GridError):
        GridFunction1D(1, [np.inf])


def test_cumulative_integral_hand_values():
    f = GridFunction2D(1.0, 1.0, [[4, 1], [3, 2]])
    assert cumulative_integral(f, 2, 2) == pytest.approx(10)
    assert cumulative_integral(f, 1, 2) == pytest.approx(5)
    assert cumulative_integral(f, 0.5, 0.5) == pytest.approx(1)
    # beyond the support the integral is constant
    assert cumulative_integral(f, 10, 10) == pytest.approx(10)


@settings(max_examples=30, deadline=None)
@given(grids(), st.floats(0.05, 6), st.floats(0.05, 6))
def test_cumulative_integral_matches_riemann(f, s, t):
    exact = float(cumulative_integral(f, s, t))
    approx = riemann_integral(f, s, t, k=1200)
    scale = max(f.values.max(), 1.0) * s * t
    assert abs(exact - approx) <= 0.01 * scale


def test_negative_query_raises():
    f = GridFunction2D(1, 1, [[1]])
    with pytest.raises(GridError):
        cumulative_integral(f, -1, 1)


def test_rect_integral_is_inclusion_exclusion():
    rng = np.random.default_rng(1)
    f = GridFunction2D(0.5, 0.25, rng.random((4, 6)))
    got = rect_integral(f, 0.3, 1.7, 0.1, 1.2)
    want = (cumulative_integral(f, 1.7, 1.2) - cumulative_integral(f, 0.3, 1.2)
            - cumulative_integral(f, 1.7, 0.1) + cumulative_integral(f, 0.3, 0.1))
    assert got == pytest.approx(want, rel=1e-12)


def test_primitive_1d():
    g = GridFunction1D(0.5, [2, 0, 4])
    assert g.primitive(0.25) == pytest.approx(0.5)
    assert g.primitive(1.25) == pytest.approx(1 + 1)
    assert g.primitive(5) == pytest.approx(3)


def test_json_round_trip(tmp_path):
    f = GridFunction2D(0.5, 2.0, [[1, 2.5], [0, 3]])
    path = tmp_path / "g.json"
    save_grid(f, path)
    g = load_grid(path)
    assert g.hx == f.hx and g.hy == f.hy
    assert np.array_equal(g.values, f.values)


def test_load_grid_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(GridError):
        load_grid(bad)
    missing = tmp_path / "m.json"
    missing.write_text(json.dumps({"hx": 1, "values": [[1]]}))
    with pytest.raises(GridError):
        load_grid(missing)


def test_staircase_basics():
    D = Staircase(1.0, 0.5, (3, 1, 0))
    assert D.cells == 4
    assert D.measure == pytest.approx(2.0)
    assert D.mask(3).tolist() == [[True, True, True], [True, False, False], [False, False, False]]
    assert Staircase(1.0, 0.5, (3, 2, 0)).contains(D)
    with pytest.raises(GridError):
        Staircase(1, 1, (1, 2))


def test_exponents():
    assert Exponents(2, 1).r == pytest.approx(2)
    assert Exponents(3, 2).r == pytest.approx(6)
    with pytest.raises(GridError):
        Exponents(1, 2).r
    with pytest.raises(GridError):
        Exponents(0, 1)


def test_flatten_keeps_mass():
    f = GridFunction2D(0.5, 0.25, [[1, 2], [3, 4]])
    g = f.flatten()
    assert g.cell_width == pytest.approx(0.125)
    assert g.total() == pytest.approx(f.total())
