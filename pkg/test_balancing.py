"""
Tests for balancing functions and the jump-intensity identity.
"""

import os

os.environ["LOG_LEVEL"] = "WARNING"

import numpy as np

from app.core.balancing import (
    BalancingError,
    BalancingFunction,
    FirstOrderRatio,
    balancing_residual,
    barker_jump_rate_mc,
    constancy_check,
    eval_balancing,
    log_eval_balancing_barker,
    logistic_cdf,
)
from app.core.targets import make_gaussian, make_skew_normal


def test_balancing_property():
    print("=" * 60)
    print("TEST: g(t) = t g(1/t) for Hastings and Barker")
    print("=" * 60)

    t = np.logspace(-8, 8, 10000)
    for g in BalancingFunction:
        residual = balancing_residual(g, t) / np.maximum(1.0, eval_balancing(g, t))
        print(f"   {g.value}: max residual {residual.max():.2e}")
        assert residual.max() < 1e-12

    assert np.all(eval_balancing(BalancingFunction.BARKER, t) <= eval_balancing(BalancingFunction.HASTINGS, t))
    assert eval_balancing(BalancingFunction.BARKER, 0.0) == 0.0
    assert eval_balancing(BalancingFunction.BARKER, np.inf) == 1.0
    assert eval_balancing(BalancingFunction.HASTINGS, np.inf) == 1.0
    print("   ✅ PASSED")


def test_constancy():
    print("\nTEST: (1 + 1/t) g(t) is constant only for Barker")
    t = np.concatenate([np.logspace(-8, 8, 10000), [0.5, 2.0]])
    assert constancy_check(BalancingFunction.BARKER, t) < 1e-12
    assert constancy_check(BalancingFunction.HASTINGS, t) >= 0.5
    assert abs(constancy_check(BalancingFunction.HASTINGS, [0.5, 1.0, 2.0]) - 0.5) < 1e-15
    assert constancy_check(BalancingFunction.HASTINGS, [1.0]) == 0.0
    print("   ✅ PASSED")


def test_logistic_forms():
    print("\nTEST: Logistic CDF and log-space Barker evaluation")
    assert logistic_cdf(0.0) == 0.5
    assert abs(logistic_cdf(np.log(3.0)) - 0.75) < 1e-15
    assert logistic_cdf(800.0) == 1.0
    assert logistic_cdf(-800.0) >= 0.0

    log_t = np.array([-700.0, -5.0, 0.0, 5.0, 700.0])
    expected = np.log(eval_balancing(BalancingFunction.BARKER, np.exp(np.array([-5.0, 0.0, 5.0]))))
    got = log_eval_balancing_barker(log_t)
    assert np.allclose(got[1:4], expected, atol=1e-14)
    assert abs(got[0] + 700.0) < 1e-12
    assert abs(got[-1]) < 1e-12
    assert abs(log_eval_balancing_barker(0.0) - np.log(0.5)) < 1e-15

    assert abs(eval_balancing(BalancingFunction.BARKER, 2.0) - 2.0 / 3.0) < 1e-15
    assert eval_balancing(BalancingFunction.HASTINGS, 0.3) == 0.3
    assert abs(log_eval_balancing_barker(50.0) + 1.9287e-22) < 1e-25
    assert abs(logistic_cdf(np.log(0.25)) - 0.2) < 1e-15

    ratio = FirstOrderRatio(beta=2.0)
    assert abs(ratio.value(0.5) - np.e) < 1e-14
    assert ratio.log_value(-1.5) == -3.0
    print("   ✅ PASSED")


def test_jump_rate_is_one_half():
    print("\nTEST: Barker jump intensity equals 1/2")
    n = 200_000
    tolerance = 3 * 0.5 / np.sqrt(n)
    cases = [
        (make_gaussian(1), 0.7, 1.0),
        (make_gaussian(1, scales=[0.2]), -1.3, 0.5),
        (make_skew_normal(50.0), -0.4, 0.3),
    ]
    for i, (target, x, std) in enumerate(cases):
        estimate = barker_jump_rate_mc(target, x, std, n, seed=i)
        print(f"   {target.name} at x={x}: {estimate:.4f}")
        assert abs(estimate - 0.5) < tolerance
    print("   ✅ PASSED")


def test_invalid_arguments():
    print("\nTEST: Invalid arguments raise BalancingError")
    bad_calls = [
        lambda: eval_balancing(BalancingFunction.BARKER, -1.0),
        lambda: eval_balancing(BalancingFunction.HASTINGS, np.nan),
        lambda: constancy_check(BalancingFunction.BARKER, [0.0, 1.0]),
        lambda: barker_jump_rate_mc(make_gaussian(2), 0.0, 1.0, 10),
        lambda: barker_jump_rate_mc(make_gaussian(1), 0.0, 1.0, 0),
    ]
    for call in bad_calls:
        try:
            call()
        except BalancingError:
            continue
        raise AssertionError("expected BalancingError")
    print("   ✅ PASSED")


if __name__ == "__main__":
    test_balancing_property()
    test_constancy()
    test_logistic_forms()
    test_jump_rate_is_one_half()
    test_invalid_arguments()
