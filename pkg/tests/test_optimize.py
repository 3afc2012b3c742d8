"""Projected multi-start ascent for the sharp constant and its reports."""

import numpy as np
import pytest

from permbounds import (
    OptimizationConfig,
    estimate_sharp_constant,
    check_two_by_two_closed_form,
    ratio,
    sharp_constant_lower,
    sharp_constant_upper,
    sweep_exponents,
)
from permbounds.optimize import sweep_csv_header, sweep_csv_row

COEFFICIENT_3 = 1.1547005383792515  # 3!/3^(3/2)

FAST = OptimizationConfig(num_starts=4, max_iters=150, seed=0)


def test_config_validation():
    with pytest.raises(ValueError):
        OptimizationConfig(num_starts=-1)
    with pytest.raises(ValueError):
        OptimizationConfig(max_iters=0)
    with pytest.raises(ValueError):
        OptimizationConfig(step_init=0.0)
    with pytest.raises(ValueError):
        OptimizationConfig(tol=-1.0)


def test_ratio_frozen_values():
    assert ratio(np.eye(3), 2.0) == 1.0
    assert np.isclose(ratio(np.ones((3, 3)), 2.0), COEFFICIENT_3, rtol=1e-14)
    with pytest.raises(ValueError):
        ratio(np.column_stack([np.zeros(3), np.ones(3), np.ones(3)]), 2.0)
    with pytest.raises(ValueError):
        ratio(np.ones((2, 3)), 2.0)


def test_estimate_pins_the_proven_constants():
    for n in (2, 3, 4):
        at_one = estimate_sharp_constant(n, 1.0, FAST)
        assert abs(at_one.best_ratio - 1.0) <= 1e-6
        at_two = estimate_sharp_constant(n, 2.0, FAST)
        want = sharp_constant_lower(n, 2.0)
        assert abs(at_two.best_ratio - want) <= 1e-6


@pytest.mark.parametrize("p", [1.25, 1.5, 1.75])
def test_estimate_order_two_is_one_between_the_endpoints(p):
    res = estimate_sharp_constant(2, p, FAST)
    assert abs(res.best_ratio - 1.0) <= 1e-6


def test_estimate_result_invariants():
    res = estimate_sharp_constant(3, 1.5, FAST)
    a = res.best_matrix.a.real
    # best matrix is feasible: nonnegative with unit p-norm columns
    assert a.min() >= 0.0
    np.testing.assert_allclose((a**1.5).sum(axis=0), 1.0, rtol=1e-10)
    assert res.starts_converged_to_best >= 1
    assert res.iterations >= 1
    hist = np.array(res.history)
    assert (np.diff(hist) > 0).all()
    assert np.isclose(res.best_ratio, ratio(a, 1.5), rtol=1e-12)
    # the estimate stays inside the proven envelope
    assert res.bound_gap_lower >= -1e-9
    assert res.bound_gap_upper >= -1e-9


def test_estimate_is_deterministic():
    a = estimate_sharp_constant(3, 1.4, FAST)
    b = estimate_sharp_constant(3, 1.4, FAST)
    assert a.best_ratio == b.best_ratio
    np.testing.assert_array_equal(a.best_matrix.a, b.best_matrix.a)


def test_estimate_validation():
    with pytest.raises(ValueError):
        estimate_sharp_constant(1, 2.0, FAST)
    with pytest.raises(ValueError):
        estimate_sharp_constant(3, np.inf, FAST)


def test_sweep_respects_envelopes():
    grid = np.linspace(1.0, 2.0, 5)
    results = sweep_exponents(3, grid, FAST)
    assert [r.p for r in results] == list(grid)
    for r in results:
        lo = sharp_constant_lower(3, r.p)
        up = sharp_constant_upper(3, r.p)
        assert lo - 1e-9 <= r.best_ratio <= up + 1e-9
    with pytest.raises(ValueError):
        sweep_exponents(3, [2.5], FAST)


def test_two_by_two_closed_form():
    eq = check_two_by_two_closed_form(1.0, 1.0, 2.0)
    assert eq.lhs == 2.0 and abs(eq.ratio - 1.0) <= 1e-15
    strict = check_two_by_two_closed_form(1.0, 1.0, 1.5)
    assert strict.slack > 1e-3
    rng = np.random.default_rng(17)
    for _ in range(50):
        x, y = rng.uniform(0.0, 3.0, 2)
        rep = check_two_by_two_closed_form(x, y, rng.uniform(1.0, 2.0))
        assert rep.slack >= -1e-12 * rep.rhs
    with pytest.raises(ValueError):
        check_two_by_two_closed_form(-1.0, 0.0, 1.5)
    with pytest.raises(ValueError):
        check_two_by_two_closed_form(1.0, 1.0, 2.5)


def test_sweep_serialization():
    assert sweep_csv_header() == (
        "n,p,best_ratio,lower_bound,upper_bound,conjecture_gap,starts_to_best,iters"
    )
    res = estimate_sharp_constant(2, 2.0, FAST)
    cells = sweep_csv_row(res).split(",")
    assert cells[0] == "2"
    assert float(cells[2]) == res.best_ratio
    assert float(cells[5]) == pytest.approx(res.best_ratio - 1.0)
