import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from acoins import (
    CACoin,
    ca_best_coin,
    ca_reusable_bounded,
    ca_reusable_unbounded,
    ca_single_toss,
    ca_thresholds,
)
from acoins.continuous import bisect_increasing, ca_single_toss_plan, min_rate_point
from acoins.errors import InstanceError, NotRegularError

SQUARE = CACoin.power(1.0, 2.0, 0.1, 0.9, id="sq")


@pytest.mark.parametrize(
    "E, decision, p_star, cost, case",
    [
        (0.05, "skip", None, 0.05, "not-beneficial"),
        (0.15, "toss", 0.1, 0.145, "boundary-min"),
        (1.0, "toss", 0.5, 0.75, "interior"),
        (2.0, "toss", 0.9, 1.01, "boundary-max"),
    ],
)
def test_single_toss_cases(E, decision, p_star, cost, case):
    res = ca_single_toss(SQUARE, E)
    assert res.decision == decision and res.case == case
    assert res.cost == pytest.approx(cost, abs=1e-9)
    if p_star is None:
        assert res.p_star is None
    else:
        assert res.p_star == pytest.approx(p_star, abs=1e-9)


@pytest.mark.parametrize(
    "coin, want",
    [
        (SQUARE, (0.1, 0.2, 1.8)),
        (CACoin.power(2.0, 2.0, 0.25, 0.5), (0.5, 1.0, 2.0)),
        (CACoin.polynomial([0.1, 0, 1], 0.1, 0.9), (1.1, 0.2, 1.8)),
    ],
)
def test_thresholds(coin, want):
    assert ca_thresholds(coin) == pytest.approx(want, rel=1e-12)


def test_interior_first_order_condition():
    rng = random.Random(3)
    for _ in range(300):
        a = rng.uniform(0.2, 5)
        q = rng.uniform(1.05, 4)
        lo = rng.uniform(0.01, 0.5)
        hi = rng.uniform(lo + 0.05, 1.0)
        ca = CACoin.power(a, q, lo, hi)
        _, E_low, E_high = ca_thresholds(ca)
        E = rng.uniform(E_low, E_high)
        res = ca_single_toss(ca, E)
        if res.case == "interior":
            assert abs(ca.dmu(res.p_star) - E) <= 1e-9 * max(1.0, E)


def _grid_optimum(ca, E, n=100_001):
    P = np.linspace(ca.p_min, ca.p_max, n)
    costs = np.array([ca.mu(x) for x in P]) + (1 - P) * E
    return min(E, float(costs.min()))


@pytest.mark.parametrize("seed", range(5))
def test_single_toss_beats_dense_grid(seed):
    rng = random.Random(seed)
    for _ in range(5):
        if rng.random() < 0.5:
            ca = CACoin.power(rng.uniform(0.2, 4), rng.uniform(1.1, 3.5), 0.05, rng.uniform(0.5, 1.0))
        else:
            ca = CACoin.polynomial([0, rng.uniform(0, 1), rng.uniform(0.1, 2), rng.uniform(0, 1)], 0.05, 0.95)
        E = rng.uniform(0.01, 6)
        res = ca_single_toss(ca, E)
        grid = _grid_optimum(ca, E)
        assert res.cost <= grid + 1e-12
        assert res.cost >= grid - 1e-6 * max(1.0, E)


def test_cost_concave_nondecreasing_in_penalty():
    Es = np.linspace(0.01, 3, 600)
    costs = np.array([ca_single_toss(SQUARE, E).cost for E in Es])
    assert (np.diff(costs) >= -1e-12).all()
    # 1-Lipschitz: the cost is a minimum of functions with slope in [0, 1]
    assert (np.diff(costs) <= np.diff(Es) + 1e-12).all()
    second = costs[:-2] - 2 * costs[1:-1] + costs[2:]
    assert (second <= 1e-9).all()


@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 5), st.floats(1e-7, 1e-3))
def test_cost_continuous_in_penalty(E, dE):
    a = ca_single_toss(SQUARE, E).cost
    b = ca_single_toss(SQUARE, E + dE).cost
    assert 0 <= b - a <= dE + 1e-12


def test_reusable_unbounded():
    plan = ca_reusable_unbounded(SQUARE, 4)
    assert plan.expected_cost == pytest.approx(0.1)
    assert plan.steps[0].p == 0.1 and plan.steps[0].repeat
    plan = ca_reusable_unbounded(SQUARE, 0.05)
    assert plan.steps == () and plan.expected_cost == 0.05


def test_reusable_bounded_trace():
    trace = ca_reusable_bounded(SQUARE, 1.0, 2)
    assert trace.values == pytest.approx([1.0, 0.75, 0.609375], rel=1e-9)
    plan = trace.to_plan()
    assert [s.p for s in plan.steps] == pytest.approx([0.375, 0.5], rel=1e-9)
    assert ca_reusable_bounded(SQUARE, 1.0, 0).values == [1.0]


def test_reusable_bounded_approaches_unbounded():
    trace = ca_reusable_bounded(SQUARE, 4.0, 200)
    assert trace.value == pytest.approx(ca_reusable_unbounded(SQUARE, 4.0).expected_cost, rel=1e-6)


def test_best_coin_among_several():
    double = CACoin.power(2.0, 2.0, 0.1, 0.9, id="dbl")
    ca, res = ca_best_coin([double, SQUARE], 1.0)
    assert ca.id == "sq" and res.cost == pytest.approx(0.75)
    assert ca_single_toss(double, 1.0).cost == pytest.approx(0.875)
    ca, res = ca_best_coin([double, SQUARE], 0.05)
    assert ca is None and res.decision == "skip" and res.cost == 0.05


def test_decreasing_rate_coin_uses_minimum_rate():
    ca = CACoin.polynomial([0.1, 0, 1], 0.1, 0.9, id="dip")
    P = min_rate_point(ca)
    assert P == pytest.approx(0.1**0.5, rel=1e-9)
    r = ca.rate(P)
    assert r == pytest.approx(2 * 0.1**0.5, rel=1e-9)
    # r(p_min) = 1.1 but tossing already pays at E = 1
    res = ca_single_toss(ca, 1.0)
    assert res.decision == "toss"
    assert res.cost < 1.0
    assert res.diagnostics and "minimum rate" in res.diagnostics[0]
    assert res.cost == pytest.approx(_grid_optimum(ca, 1.0), abs=1e-6)
    assert ca_single_toss(ca, r * 0.99).decision == "skip"
    plan = ca_reusable_unbounded(ca, 4)
    assert plan.expected_cost == pytest.approx(r, rel=1e-9)
    assert ca_single_toss_plan(ca, 1.0).diagnostics == res.diagnostics


def test_irregular_coin_rejected():
    with pytest.raises(InstanceError):
        CACoin.power(1.0, 0.5, 0.1, 0.9)
    concave = CACoin.polynomial([0, 1, -0.5], 0.1, 0.9)
    with pytest.raises(NotRegularError):
        ca_single_toss(concave, 1.0)
    falling = CACoin.polynomial([1.0, -1.0], 0.1, 0.9)
    with pytest.raises(NotRegularError):
        ca_thresholds(falling)


def test_bisection_tolerances():
    x = bisect_increasing(lambda t: t**3, 0.0, 2.0, 1.0)
    assert x == pytest.approx(1.0, abs=1e-12)
    x = bisect_increasing(lambda t: t, 0.0, 1.0, 0.3, ftol=1e-3)
    assert abs(x - 0.3) <= 1e-3
