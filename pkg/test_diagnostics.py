"""
Tests for ESS, split R-hat and the scenario summary.
"""

import os

os.environ["LOG_LEVEL"] = "WARNING"

import numpy as np
from scipy.signal import lfilter

from app.core.diagnostics import (
    DiagnosticsError,
    assess_scenario,
    autocorrelation,
    ess,
    ess_summary,
    split_rhat,
    split_rhat_array,
)
from app.core.trace_store import SUMMARY_COLUMNS, Trace


def _ar1(phi: float, n: int, seed: int) -> np.ndarray:
    noise = np.random.default_rng(seed).standard_normal(n)
    noise[0] /= np.sqrt(1.0 - phi ** 2)
    return lfilter([1.0], [1.0, -phi], noise)


def _trace(samples: np.ndarray, label: str = "test") -> Trace:
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1:
        samples = samples[:, None]
    return Trace(samples=samples, accept_flags=np.ones(samples.shape[0], dtype=bool), seed=0, sampler_label=label)


def test_ess_calibration():
    print("=" * 60)
    print("TEST: ESS on white noise and AR(1) series")
    print("=" * 60)

    n = 100_000
    for phi in (0.0, 0.5, 0.9):
        expected = n * (1.0 - phi) / (1.0 + phi)
        estimate = ess(_ar1(phi, n, seed=int(phi * 10)))
        print(f"   phi={phi}: ESS {estimate:.0f}, expected {expected:.0f}")
        assert abs(estimate / expected - 1.0) < 0.2
    print("   ✅ PASSED")


def test_ess_edge_cases():
    print("\nTEST: ESS edge cases")
    alternating = np.where(np.arange(1000) % 2 == 0, 1.0, -1.0)
    assert abs(autocorrelation(alternating)[1] + 0.999) < 1e-9
    value = ess(alternating)
    print(f"   alternating series: ESS {value:.0f} for n = 1000")
    assert value > 1000
    assert abs(value - 1050.0) < 1e-6

    for bad in (np.zeros(500), np.arange(50.0), np.r_[np.arange(200.0), np.nan]):
        try:
            ess(bad)
            raise AssertionError("expected DiagnosticsError")
        except DiagnosticsError:
            pass
    print("   ✅ PASSED")


def test_ess_summary():
    print("\nTEST: ESS summary over coordinates")
    rng = np.random.default_rng(1)
    samples = rng.standard_normal((1000, 3))
    samples[:, 2] = 4.0
    report = ess_summary(_trace(samples), burn_in_fraction=0.5)
    assert report.n_used == 500
    assert report.failed and report.stuck_coordinates == [2]
    assert np.isnan(report.per_coordinate_ess[2])
    assert report.min_ess <= report.median_ess
    assert report.min_ess > 300

    # anticorrelated chains stay within 5% of the sample count
    anti = np.column_stack([_ar1(-0.95, 10_000, seed=5), np.where(np.arange(10_000) % 2 == 0, 1.0, -1.0)])
    report = ess_summary(_trace(anti), burn_in_fraction=0.0)
    assert report.n_used == 10_000
    assert np.all(report.per_coordinate_ess <= 1.05 * report.n_used + 1e-9)
    assert report.per_coordinate_ess[0] > report.n_used

    try:
        ess_summary(_trace(rng.standard_normal(150)), burn_in_fraction=0.5)
        raise AssertionError("expected DiagnosticsError")
    except DiagnosticsError:
        pass
    print("   ✅ PASSED")


def test_split_rhat():
    print("\nTEST: Split R-hat")
    rng = np.random.default_rng(2)
    mixed = rng.standard_normal((4, 1000))
    assert split_rhat_array(mixed) < 1.01

    shifted = mixed + np.array([[0.0], [0.0], [5.0], [5.0]])
    assert split_rhat_array(shifted) > 1.1
    for scale, offset in ((3.0, -7.0), (-0.01, 250.0)):
        assert abs(split_rhat_array(scale * shifted + offset) - split_rhat_array(shifted)) < 1e-10
        assert abs(split_rhat_array(scale * mixed + offset) - split_rhat_array(mixed)) < 1e-10

    # a drifting single chain disagrees with itself once split
    trend = np.linspace(0.0, 10.0, 1000) + 0.1 * rng.standard_normal(1000)
    assert split_rhat_array(trend[None, :]) > 1.1

    traces = [_trace(row) for row in mixed]
    assert abs(split_rhat(traces, 0) - split_rhat_array(mixed)) < 1e-14
    bad_calls = [
        lambda: split_rhat(traces[:1], 0),
        lambda: split_rhat([traces[0], _trace(mixed[1, :500])], 0),
        lambda: split_rhat([_trace(r[:50]) for r in mixed], 0),
    ]
    for call in bad_calls:
        try:
            call()
        except DiagnosticsError:
            continue
        raise AssertionError("expected DiagnosticsError")
    print("   ✅ PASSED")


def test_assess_scenario():
    print("\nTEST: Scenario summaries")
    rng = np.random.default_rng(3)
    good = [_trace(rng.standard_normal((2000, 2))) for _ in range(3)]
    summary = assess_scenario(good, dataset_variant="raw", sampler="barker", precond_mode="diag")
    assert summary.status == "ok", summary.reasons
    assert summary.accept_rate == 1.0
    assert summary.rhat_max < 1.05
    row = summary.to_row()
    assert list(row) == SUMMARY_COLUMNS
    assert row["sampler"] == "barker" and row["status"] == "ok"

    stuck = rng.standard_normal((2000, 2))
    stuck[:, 1] = 0.0
    summary = assess_scenario([good[0], _trace(stuck)])
    assert summary.status == "n/a"
    assert any("stuck" in reason for reason in summary.reasons)

    apart = [_trace(rng.standard_normal((2000, 2)) + shift) for shift in (0.0, 10.0)]
    assert assess_scenario(apart).status == "n/a"

    failed = assess_scenario([], failure="TargetError: gradient is not finite")
    assert failed.status == "n/a" and np.isnan(failed.min_ess)
    print("   ✅ PASSED")


if __name__ == "__main__":
    test_ess_calibration()
    test_ess_edge_cases()
    test_split_rhat()
    test_ess_summary()
    test_assess_scenario()
