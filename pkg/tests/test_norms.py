import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from conftest import grids, random_grid
from lorentz2d import GridError, GridFunction1D, GridFunction2D, IndicatorWeight, PowerWeight, ProductWeight, constant
from lorentz2d import generators, norms
from lorentz2d.weights import unit_weight_2d


def lambda_oracle(f: GridFunction2D, v, p):
    vals = -np.sort(-f.values.ravel())
    h = f.cell_area

    def integrand(x):
        k = int(x // h)
        return (vals[k] ** p if k < len(vals) else 0.0) * v.density(x)

    edges = np.arange(len(vals) + 1) * h
    total = sum(integrate.quad(integrand, a, b, limit=200)[0] for a, b in zip(edges[:-1], edges[1:]))
    return total ** (1 / p)


@pytest.mark.parametrize("v", [PowerWeight(1, -0.5), IndicatorWeight(0.7), constant(2.0), PowerWeight(1, 2.0)],
                         ids=lambda v: v.spec())
def test_lambda_norm_matches_quadrature(v):
    rng = np.random.default_rng(4)
    f = random_grid(rng, 3, 3, 0.5, 0.5)
    assert norms.lambda_norm(f, v, 1.5) == pytest.approx(lambda_oracle(f, v, 1.5), rel=1e-7)


@settings(max_examples=50, deadline=None)
@given(grids(), st.sampled_from([1.0, 2.0, 3.0]))
def test_unit_weights_give_lp_norm(f, p):
    lp = float(np.sum(f.values**p) * f.cell_area) ** (1 / p)
    one = constant(1.0)
    assert norms.lambda_norm(f, one, p) == pytest.approx(lp, rel=1e-12, abs=1e-15)
    assert norms.lambda2_norm(f, unit_weight_2d(), p) == pytest.approx(lp, rel=1e-12, abs=1e-15)
    for order in ("y-then-x", "x-then-y"):
        assert norms.mixed_norm(f, one, one, p, p, order) == pytest.approx(lp, rel=1e-12, abs=1e-15)


def test_staircase_example_values():
    u, v = IndicatorWeight(1.0), constant(1.0)
    f = generators.staircase_blocks(4, 1.0)
    assert norms.mixed_norm(f, u, v, 1, 1) == pytest.approx(1.0, rel=1e-14)
    assert norms.lambda2_norm(f, ProductWeight(u, v), 1) == pytest.approx(25 / 12, rel=1e-14)


def test_diagonal_example_values():
    u, v = IndicatorWeight(1.0), constant(1.0)
    f = generators.diagonal_blocks(8, 1.0)
    assert norms.lambda2_norm(f, ProductWeight(u, v), 1) == pytest.approx(1.0, rel=1e-14)
    assert norms.mixed_norm(f, u, v, 1, 1, "x-then-y") == pytest.approx(2 - 2.0**-7, rel=1e-14)


def test_bad_arguments():
    f = GridFunction2D(1, 1, [[1]])
    with pytest.raises(GridError):
        norms.lambda2_norm(f, unit_weight_2d(), 0)
    with pytest.raises(GridError):
        norms.mixed_norm(f, constant(), constant(), 1, 1, "sideways")
    with pytest.raises(GridError):
        norms.star_norm(f, constant(), constant(), 0.5)


def test_star_norm_unit_square_closed_form():
    # S^2 chi = min(s,1) min(t,1) / (st); its L^2 norm squared is (1 + 1)^2
    f = GridFunction2D(1, 1, [[1.0]])
    one = constant(1.0)
    assert norms.star_norm(f, one, one, 2.0) == pytest.approx(2.0, rel=1e-3)
    assert norms.norm2_starstar(f, one, one, 2.0) == pytest.approx(2.0, rel=1e-3)


def test_star_norm_power_weight_closed_form():
    # u = s^(-1/2): int_0^1 s^(-1/2) ds + int_1^oo s^(-5/2) ds = 2 + 2/3
    f = GridFunction2D(1, 1, [[1.0]])
    u = PowerWeight(1, -0.5)
    res = norms.operator_norm_estimate("s2", f, u, constant(1.0), 2.0)
    assert res.converged
    assert res.value == pytest.approx(math.sqrt((2 + 2 / 3) * 2), rel=1e-3)


def test_star_norm_infinite_for_p_one_unit_weight():
    f = GridFunction2D(1, 1, [[1.0]])
    one = constant(1.0)
    assert math.isinf(norms.star_norm(f, one, one, 1.0))


@settings(max_examples=25, deadline=None)
@given(grids(max_m=4, max_n=4, hx=0.5, hy=0.5))
def test_lambda2_below_star(f):
    one = constant(1.0)
    if f.total() == 0:
        return
    l2 = norms.lambda2_norm(f, unit_weight_2d(), 2.0)
    st_ = norms.star_norm(f, one, one, 2.0)
    assert l2 <= st_ * (1 + 1e-3)
    assert st_ <= 4.05 * l2


@pytest.mark.parametrize("seed", range(5))
def test_star_norm_triangle_at_fixed_refinement(seed):
    rng = np.random.default_rng(seed)
    one = constant(1.0)
    f, g = random_grid(rng), random_grid(rng)
    k = 3
    lhs = norms.star_norm(f + g, one, one, 2.0, refine=k)
    rhs = norms.star_norm(f, one, one, 2.0, refine=k) + norms.star_norm(g, one, one, 2.0, refine=k)
    assert lhs <= rhs * (1 + 1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_mixed_dominated_for_decreasing_u(seed):
    rng = np.random.default_rng(seed)
    f = random_grid(rng)
    for u, v in [(IndicatorWeight(1.0), constant(1.0)), (PowerWeight(1, -0.5), constant(1.0))]:
        for p in (1.0, 2.0):
            mixed = norms.mixed_norm(f, u, v, p, p)
            l2 = norms.lambda2_norm(f, ProductWeight(u, v), p)
            assert mixed <= l2 * (1 + 1e-9)


def test_weak_norm_1d():
    g = GridFunction1D(1.0, [3, 1, 2])
    # sup over v of v * |{f >= v}|: 3*1, 2*2, 1*3
    assert norms.weak_lp_norm(g, 1.0) == pytest.approx(4.0)
