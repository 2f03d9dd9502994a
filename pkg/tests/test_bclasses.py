import math

import numpy as np
import pytest
from scipy import integrate

from conftest import random_grid
from lorentz2d import (
    GridError,
    GridFunction1D,
    GridFunction2D,
    IndicatorWeight,
    PowerWeight,
    ProductWeight,
    Staircase,
    StepWeight,
    StepWeight2D,
    bclasses,
    constant,
    hardy,
)


@pytest.mark.parametrize("alpha,p", [(0.0, 2.0), (-0.5, 2.0), (1.0, 4.0), (0.5, 3.0)])
def test_bp_power_closed_form(alpha, p):
    v = bclasses.bp_constant(PowerWeight(1.0, alpha), p)
    assert v.constant == pytest.approx((alpha + 1) / (p - alpha - 1), rel=1e-12)
    assert v.member
    # the ratio is constant in r for power weights
    for r in (0.1, 1.0, 7.0):
        assert bclasses.bp_ratio(PowerWeight(1.0, alpha), p, r) == pytest.approx(v.constant, rel=1e-12)


def test_bp_power_not_member():
    v = bclasses.bp_constant(PowerWeight(1.0, 1.0), 2.0)
    assert math.isinf(v.constant) and not v.member


def test_bp_indicator():
    assert bclasses.bp_constant(IndicatorWeight(1.0), 2.0).constant == pytest.approx(1.0)
    assert bclasses.bp_constant(IndicatorWeight(3.0), 3.0).constant == pytest.approx(0.5)
    v = bclasses.bp_constant(IndicatorWeight(1.0), 1.0)
    assert math.isinf(v.constant) and v.notes


def bp_oracle(v: StepWeight, p: float) -> float:
    """Sup of r^p int_r^oo v x^-p / V(r) on a fine r-grid, integrals by quadrature."""
    best = 0.0
    edge = v.g.length
    for r in np.linspace(1e-3, edge * 1.5, 600):
        V = integrate.quad(v.density, 0, r, points=list(v.breakpoints), limit=200)[0]
        if V <= 0:
            continue
        pts = [b for b in v.breakpoints if b > r]
        T = integrate.quad(lambda x: v.density(x) * x**-p, r, edge, points=pts or None, limit=200)[0] if r < edge else 0.0
        best = max(best, r**p * T / V)
    return best


@pytest.mark.parametrize("vals", [[2.0, 0.5, 1.0], [1.0, 3.0, 0.5, 0.5], [1.0, 0.0, 2.0]])
def test_bp_step_against_quadrature(vals):
    v = StepWeight(GridFunction1D(0.5, vals))
    got = bclasses.bp_constant(v, 2.0).constant
    oracle = max(bp_oracle(v, 2.0), 1.0)  # 1/(p-1) is the r -> 0 limit
    assert got >= oracle * (1 - 1e-3)
    assert got <= oracle * (1 + 2e-2)


def test_bp_step_leading_zero_is_infinite():
    v = StepWeight(GridFunction1D(1.0, [0.0, 1.0]))
    assert math.isinf(bclasses.bp_constant(v, 2.0).constant)


def test_b1inf():
    assert bclasses.b1inf_constant(constant(1.0)).constant == 1.0
    assert math.isinf(bclasses.b1inf_constant(PowerWeight(1.0, 1.0)).constant)
    assert bclasses.b1inf_constant(PowerWeight(1.0, -0.5)).constant == 1.0


@pytest.mark.parametrize("vals", [[1.0, 3.0, 0.5], [2.0, 0.5, 4.0, 1.0], [1.0, 1.0, 2.0]])
def test_b1inf_step_against_brute_force(vals):
    v = StepWeight(GridFunction1D(0.5, vals))
    rs = np.linspace(1e-4, 3.0, 1500)
    avg = np.array([v.V(r) / r for r in rs])
    brute = max(np.max(avg[k:] / avg[k]) for k in range(len(rs)))  # sup over s <= r of avg(r)/avg(s)
    brute = max(brute, max(avg) / min(avg[: np.argmax(avg) + 1]))
    got = bclasses.b1inf_constant(v).constant
    assert got >= brute * (1 - 1e-9)
    assert got <= brute * (1 + 1e-2)


def test_product_formula():
    u = PowerWeight(1.0, -0.5)
    assert bclasses.b2_product_formula(u, u) == 4.0
    assert math.isinf(bclasses.b2_product_formula(constant(1.0), u))
    assert math.isinf(bclasses.b2_product_formula(IndicatorWeight(1.0), u))


@pytest.mark.parametrize("alpha,beta", [(-0.5, -0.5), (-0.25, -0.75)])
def test_staircase_ratio_equals_product_formula_for_power_weights(alpha, beta):
    w = ProductWeight(PowerWeight(1.0, alpha), PowerWeight(1.0, beta))
    want = bclasses.b2_product_formula(w.u, w.v)
    rng = np.random.default_rng(0)
    for _ in range(10):
        h = tuple(int(x) for x in -np.sort(-rng.integers(1, 7, 5)))
        assert bclasses.staircase_ratio(w, Staircase(0.5, 0.5, h)) == pytest.approx(want, rel=1e-12)


def test_b21_sup_power_weights_is_four():
    u = PowerWeight(1.0, -0.5)
    for c in (4, 6, 8):
        v = bclasses.b21_staircase_sup(ProductWeight(u, u), box=(4, 4), cells=(c, c))
        assert v.constant == pytest.approx(4.0, rel=1e-12)
        assert not v.conclusive


def test_b21_sup_unit_weight_infinite():
    v = bclasses.b21_staircase_sup(ProductWeight(constant(1.0), constant(1.0)), box=(1, 1), cells=(2, 2))
    assert math.isinf(v.constant)


def test_step_tables_match_quadrature():
    rng = np.random.default_rng(5)
    grid = GridFunction2D(1.0, 1.0, rng.uniform(0.2, 2.0, (3, 3)))
    w = StepWeight2D(grid)
    D = Staircase(1.0, 1.0, (3, 2, 1))
    # int over the box of S^2(chi_D) * w by a fine midpoint rule
    k = 900
    x = (np.arange(k) + 0.5) * 3 / k
    S, T = np.meshgrid(x, x, indexing="ij")
    chi = D.indicator(3)
    wv = grid.values[np.floor(S).astype(int), np.floor(T).astype(int)]
    num = float(np.sum(hardy.s2_values(chi, S, T) * wv) * (3 / k) ** 2)
    den = w.staircase_mass(D)
    assert bclasses.staircase_ratio(w, D) == pytest.approx(num / den, rel=2e-3)


def test_step_tables_agree_with_product_tables_for_constant_weight():
    # a constant step weight equals the unit product weight on its box
    grid = GridFunction2D(1.0, 1.0, np.ones((4, 4)))
    num, den = bclasses.s2_indicator_tables(StepWeight2D(grid), 1.0, 1.0, 4, 4)
    assert np.allclose(den, np.tile(np.arange(5.0), (4, 1)))
    # column 0 of full height: int_0^1 int_0^4 min(t,4)/t ... computed by hand
    # S factor for column 0 over [0,4]: 1 + log 4; T factor for height 4 over [0,4]: 4
    assert num[0, 4] == pytest.approx((1 + math.log(4)) * 4)


def test_b21_step_weight_lower_bound():
    rng = np.random.default_rng(6)
    grid = GridFunction2D(1.0, 1.0, rng.uniform(0.2, 2.0, (3, 3)))
    v = bclasses.b21_staircase_sup(StepWeight2D(grid))
    assert v.details["lower_bound"]
    assert v.constant >= 1.0  # S^2 chi_D >= chi_D
    with pytest.raises(GridError):
        bclasses.b21_staircase_sup(StepWeight2D(grid), cells=(4, 4))


def test_b2p_membership():
    w = ProductWeight(PowerWeight(1.0, -0.5), constant(1.0))
    v = bclasses.b2p_membership(w, 2.0)
    assert v.constant == pytest.approx(1.0)  # max(1/3, 1)
    one = bclasses.b2p_membership(ProductWeight(constant(1.0), constant(1.0)), 1.0)
    assert not one.member
    assert any("Banach" in n for n in one.notes)
    with pytest.raises(GridError):
        bclasses.b2p_membership(w, 0.5)


def test_verdict_json_marks_infinity():
    d = bclasses.b1inf_constant(PowerWeight(1.0, 1.0)).to_dict()
    assert d["constant"] is None and d["infinite"] is True
