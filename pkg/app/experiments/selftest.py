"""
Fast oracle suites. Each suite returns (passed, detail); `cmd_selftest`
prints one PASS/FAIL line per suite.
"""

import time
from typing import Callable, List, Tuple

import numpy as np
from scipy.signal import lfilter
from scipy.stats import kstest

from app.core.balancing import (
    BalancingFunction,
    balancing_residual,
    barker_jump_rate_mc,
    constancy_check,
    eval_balancing,
)
from app.core.data import design_matrix, synthesize_imbalanced
from app.core.diagnostics import ess
from app.core.jump_process import (
    GaussianIncrement,
    flip_probability,
    sample_skew_symmetric_increments,
    skew_symmetric_cdf,
)
from app.core.logger import get_logger
from app.core.preconditioner import Preconditioner
from app.core.targets import (
    GaussianTarget,
    fd_gradient_check,
    make_gaussian,
    make_logistic_posterior,
    make_skew_normal,
)
from app.experiments.skew_study import skew_acceptance_table
from app.samplers.oracles import reversibility_check
from app.samplers.runner import SAMPLERS, make_sampler

logger = get_logger("SelfTest")

Suite = Callable[[], Tuple[bool, str]]


def suite_balancing_property() -> Tuple[bool, str]:
    t = np.logspace(-8, 8, 10000)
    worst = 0.0
    for g in BalancingFunction:
        scaled = balancing_residual(g, t) / np.maximum(1.0, eval_balancing(g, t))
        worst = max(worst, float(np.max(scaled)))
    ordered = bool(np.all(eval_balancing(BalancingFunction.BARKER, t) <= eval_balancing(BalancingFunction.HASTINGS, t)))
    return worst < 1e-12 and ordered, f"max residual {worst:.2e}, g_B <= g_H: {ordered}"


def suite_constancy() -> Tuple[bool, str]:
    t = np.concatenate([np.logspace(-8, 8, 10000), [0.5, 2.0]])
    barker = constancy_check(BalancingFunction.BARKER, t)
    hastings = constancy_check(BalancingFunction.HASTINGS, t)
    return barker < 1e-12 and hastings >= 0.5, f"Barker {barker:.2e}, Hastings {hastings:.3f}"


def suite_jump_rate() -> Tuple[bool, str]:
    n = 1_000_000
    tolerance = 3 * 0.5 / np.sqrt(n)
    cases = [
        (make_gaussian(1), 0.7, 1.0),
        (make_gaussian(1, scales=[0.2]), -1.3, 0.5),
        (make_skew_normal(5.0), 0.1, 1.0),
        (make_skew_normal(50.0), -0.4, 0.3),
        (make_skew_normal(1.0), 2.0, 2.0),
    ]
    worst = max(abs(barker_jump_rate_mc(t, x, s, n, seed=i) - 0.5) for i, (t, x, s) in enumerate(cases))
    return worst < tolerance, f"max |estimate - 1/2| = {worst:.2e} (tolerance {tolerance:.2e})"


def suite_skew_symmetric_sampler() -> Tuple[bool, str]:
    rng = np.random.default_rng(0)
    q = GaussianIncrement(1.0)
    p_values = []
    for beta in (-5.0, 0.0, 0.3, 10.0):
        draws = sample_skew_symmetric_increments(beta, q, rng, 100_000)
        p_values.append(kstest(draws, skew_symmetric_cdf(beta, q)).pvalue)

    # xi = 1.2 with beta * xi = ln(1/4) keeps its sign one time in five
    n = 100_000
    p = float(flip_probability(np.log(0.25) / 1.2, 1.2))
    hits = float(np.mean(rng.random(n) < p))
    se = np.sqrt(0.2 * 0.8 / n)
    ok = min(p_values) > 0.01 and abs(hits - 0.2) < 3 * se
    return ok, f"min KS p-value {min(p_values):.3f}, P(b=1) = {hits:.4f}"


def suite_skew_normal_collapse() -> Tuple[bool, str]:
    table = skew_acceptance_table((1.0, 10.0, 100.0, 1000.0))
    log_mala = table["log_alpha_mala"].to_numpy()
    decreasing = bool(np.all(np.diff(log_mala) < 0))
    collapsed = log_mala[-1] < np.log(1e-10)
    barker_ok = bool(np.all(table["alpha_barker"] > 0.01))
    ok = decreasing and collapsed and barker_ok
    return ok, f"log alpha MALA at eta=1000: {log_mala[-1]:.1f}, min alpha Barker {table['alpha_barker'].min():.3f}"


def _logistic_target(seed: int = 0, d_imbalanced: int = 3, d_regular: int = 3):
    ds = synthesize_imbalanced(n=60, d_imbalanced=d_imbalanced, d_regular=d_regular, rare_count=2, seed=seed)
    return make_logistic_posterior(design_matrix(ds), ds.labels)


def suite_gradients() -> Tuple[bool, str]:
    rng = np.random.default_rng(1)
    cases = [
        (make_gaussian(4, scales=[0.1, 1.0, 3.0, 30.0]), 3.0, 1e-6),
        (make_skew_normal(1.0), 3.0, 1e-6),
        (make_skew_normal(1.0e4), 3.0, 1e-7),
        (_logistic_target(), 0.5, 1e-6),
    ]
    worst = 0.0
    for target, spread, h in cases:
        for _ in range(100):
            worst = max(worst, fd_gradient_check(target, rng.uniform(-spread, spread, target.dim), h))
    return worst < 1e-5, f"max relative error {worst:.2e}"


def _ar1(phi: float, n: int, rng: np.random.Generator) -> np.ndarray:
    noise = rng.standard_normal(n)
    noise[0] /= np.sqrt(1.0 - phi ** 2)
    return lfilter([1.0], [1.0, -phi], noise)


def suite_ess_calibration() -> Tuple[bool, str]:
    n = 100_000
    details = []
    ok = True
    for phi in (0.0, 0.5, 0.9):
        expected = n * (1.0 - phi) / (1.0 + phi)
        hits = sum(abs(ess(_ar1(phi, n, np.random.default_rng(seed))) / expected - 1.0) < 0.15 for seed in range(5))
        ok = ok and hits >= 4
        details.append(f"phi={phi}: {hits}/5")
    return ok, ", ".join(details)


def suite_reversibility() -> Tuple[bool, str]:
    rng = np.random.default_rng(2)
    cov = np.array([[1.0, 0.6, 0.0], [0.6, 2.0, -0.3], [0.0, -0.3, 0.5]])
    logistic = _logistic_target(seed=3)
    families = [
        (GaussianTarget(np.zeros(3), cov), Preconditioner.from_covariance(0.8, cov), 2.0),
        (make_skew_normal(5.0), Preconditioner.identity(1, global_scale=1.3), 2.0),
        (logistic, Preconditioner.identity(logistic.dim, global_scale=0.3), 0.5),
    ]
    worst = 0.0
    for kind in SAMPLERS:
        for target, precond, spread in families:
            sampler = make_sampler(kind, target)
            for _ in range(100):
                x = rng.uniform(-spread, spread, target.dim)
                y = x + rng.normal(0.0, spread / 2, target.dim)
                worst = max(worst, reversibility_check(sampler, target, x, y, precond))
    return worst < 1e-10, f"max detailed-balance residual {worst:.2e}"


SUITES: List[Tuple[str, Suite]] = [
    ("balancing property", suite_balancing_property),
    ("constancy", suite_constancy),
    ("jump rate 1/2", suite_jump_rate),
    ("skew-symmetric sampler", suite_skew_symmetric_sampler),
    ("skew-normal collapse", suite_skew_normal_collapse),
    ("gradient checks", suite_gradients),
    ("ESS calibration", suite_ess_calibration),
    ("reversibility", suite_reversibility),
]


def cmd_selftest() -> int:
    failures = 0
    for name, suite in SUITES:
        start = time.perf_counter()
        try:
            passed, detail = suite()
        except Exception as e:
            passed, detail = False, f"{type(e).__name__}: {e}"
        elapsed = time.perf_counter() - start
        failures += 0 if passed else 1
        print(f"{'PASS' if passed else 'FAIL'}  {name:<24} {detail} ({elapsed:.1f}s)")
    logger.info(f"{len(SUITES) - failures}/{len(SUITES)} suites passed")
    return 0 if failures == 0 else 1
