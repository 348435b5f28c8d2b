"""
Tests for target densities: closed-form values, gradients, stability.
"""

import os

os.environ["LOG_LEVEL"] = "WARNING"

import numpy as np
from scipy.integrate import quad
from scipy.stats import norm

from app.core.targets import (
    LogisticRegressionPosterior,
    SkewNormalTarget,
    TargetError,
    fd_gradient_check,
    make_gaussian,
    make_logistic_posterior,
    make_skew_normal,
)
from app.core.data import design_matrix, synthesize_imbalanced


def test_closed_form_values():
    print("=" * 60)
    print("TEST: Closed-form log-densities and gradients")
    print("=" * 60)

    gauss = make_gaussian(1)
    assert abs(gauss.log_density([0.0]) + 0.5 * np.log(2 * np.pi)) < 1e-12
    x = np.array([1.0, -2.0, 0.5])
    assert np.allclose(make_gaussian(3).grad_log_density(x), -x)

    skew0 = make_skew_normal(0.0)
    z = np.linspace(-5, 5, 1000)
    diffs = [abs(skew0.log_density([zi]) - norm.logpdf(zi)) for zi in z]
    assert max(diffs) < 1e-12

    post = make_logistic_posterior(np.array([[1.0]]), np.array([1.0]), 25.0)
    assert abs(post.log_density([0.0]) - np.log(0.5)) < 1e-12
    assert np.allclose(post.grad_log_density([0.0]), [0.5])

    post0 = make_logistic_posterior(np.array([[1.0]]), np.array([0.0]), 25.0)
    log_lik = post0.log_density([10.0]) + 100.0 / 50.0
    assert abs(log_lik + 10.0000454) < 1e-6
    print("   ✅ PASSED")


def test_skew_normal_is_normalized_and_stable():
    print("\nTEST: Skew-normal normalization and large-eta stability")
    target = make_skew_normal(3.0)
    mass, _ = quad(lambda t: np.exp(target.log_density([t])), -12, 12, points=[0.0], epsabs=1e-12)
    assert abs(mass - 1.0) < 1e-8

    steep = make_skew_normal(50.0)
    grad = steep.grad_log_density([-0.5])[0]
    # -z plus a Mills-ratio term of roughly eta * 25
    assert np.isfinite(grad) and grad > 1000

    for eta in (1.0, 1e3, 1e4):
        t = make_skew_normal(eta)
        for z in (-1e6, -3.0, 0.0, 2.0, 1e6):
            assert np.isfinite(t.log_density([z]))
            assert np.isfinite(t.grad_log_density([z])[0])

    # far above the mode the skew term vanishes
    assert abs(make_skew_normal(1e3).grad_log_density([1.5])[0] + 1.5) < 1e-8
    print("   ✅ PASSED")


def test_skew_normal_mode():
    print("\nTEST: Skew-normal mode")
    assert make_skew_normal(0.0).mode() == 0.0
    for eta in (1.0, 10.0, 1000.0):
        target = make_skew_normal(eta)
        m = target.mode()
        assert 0.0 < m < 1.5
        assert abs(target.grad_log_density([m])[0]) < 1e-6 * eta
    print("   ✅ PASSED")


def test_fd_gradient_check():
    print("\nTEST: Finite-difference gradient agreement")
    rng = np.random.default_rng(0)
    assert fd_gradient_check(make_gaussian(2), [1.0, -2.0]) < 1e-6
    assert fd_gradient_check(make_skew_normal(20.0), [0.1]) < 1e-5

    ds = synthesize_imbalanced(n=80, d_imbalanced=3, d_regular=3, seed=1)
    logistic = make_logistic_posterior(design_matrix(ds), ds.labels)
    cases = [
        (make_gaussian(3, scales=[0.5, 1.0, 4.0]), 3.0, 1e-6),
        (make_skew_normal(2.0), 3.0, 1e-6),
        (make_skew_normal(1e4), 3.0, 1e-7),
        (logistic, 0.5, 1e-6),
    ]
    for target, spread, h in cases:
        worst = max(fd_gradient_check(target, rng.uniform(-spread, spread, target.dim), h) for _ in range(100))
        print(f"   {target.name}: max relative error {worst:.2e}")
        assert worst < 1e-5
    print("   ✅ PASSED")


def test_logistic_posterior():
    print("\nTEST: Logistic posterior")
    empty = LogisticRegressionPosterior(np.zeros((0, 2)), np.zeros(0), prior_variance=4.0)
    beta = np.array([1.0, -2.0])
    assert np.allclose(empty.grad_log_density(beta), -beta / 4.0)

    ds = synthesize_imbalanced(n=120, d_imbalanced=2, d_regular=4, seed=3)
    post = make_logistic_posterior(design_matrix(ds), ds.labels)
    mode = post.find_mode()
    assert np.linalg.norm(post.grad_log_density(mode)) < 1e-8

    rng = np.random.default_rng(4)
    peak = post.log_density(mode)
    for _ in range(100):
        direction = rng.standard_normal(post.dim)
        assert post.log_density(mode + 0.1 * direction) < peak

    big = make_logistic_posterior(np.array([[1.0], [1.0]]), np.array([1.0, 0.0]))
    assert np.isfinite(big.log_density([1e4]))
    print("   ✅ PASSED")


def test_invalid_inputs():
    print("\nTEST: Invalid inputs raise TargetError")
    bad_calls = [
        lambda: make_gaussian(2).log_density([1.0]),
        lambda: make_gaussian(1).log_density([np.nan]),
        lambda: make_skew_normal(-1.0),
        lambda: make_logistic_posterior(np.ones((2, 1)), np.array([0.0, 2.0])),
        lambda: make_logistic_posterior(np.ones((3, 1)), np.array([0.0, 1.0])),
    ]
    for call in bad_calls:
        try:
            call()
        except TargetError:
            continue
        raise AssertionError("expected TargetError")
    assert isinstance(make_skew_normal(1.0), SkewNormalTarget)
    print("   ✅ PASSED")


if __name__ == "__main__":
    test_closed_form_values()
    test_skew_normal_is_normalized_and_stable()
    test_skew_normal_mode()
    test_fd_gradient_check()
    test_logistic_posterior()
    test_invalid_inputs()
