"""
Balancing functions g with g(t) = t g(1/t), the first-order ratio t*, and the
numerical checks built on them.

Acceptance arithmetic elsewhere in the package runs in log space; the
linear-space evaluations here back tests and small oracles.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np
from scipy.special import expit

from app.core.targets import TargetDensity

ArrayLike = Union[float, np.ndarray]


class BalancingError(ValueError):
    """Raised for arguments outside a balancing function's domain."""


class BalancingFunction(str, Enum):
    HASTINGS = "hastings"
    BARKER = "barker"


def _as_array(value, allow_negative: bool = False) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if np.any(np.isnan(arr)):
        raise BalancingError("argument is NaN")
    if not allow_negative and np.any(arr < 0):
        raise BalancingError(f"balancing functions are defined for t >= 0, got {value}")
    return arr


def _unwrap(arr: np.ndarray) -> ArrayLike:
    return float(arr) if arr.ndim == 0 else arr


def eval_balancing(g: BalancingFunction, t: ArrayLike) -> ArrayLike:
    """g(t) in [0, 1]; t = +inf maps to 1 for both kinds."""
    t = _as_array(t)
    if g == BalancingFunction.HASTINGS:
        return _unwrap(np.minimum(1.0, t))
    with np.errstate(divide="ignore", invalid="ignore"):
        # t/(1+t) for t <= 1, 1/(1+1/t) above, so neither branch overflows
        small = t / (1.0 + t)
        large = 1.0 / (1.0 + 1.0 / np.where(t > 1.0, t, 1.0))
    out = np.where(t > 1.0, large, small)
    out = np.where(np.isinf(t), 1.0, out)
    return _unwrap(out)


def log_eval_balancing_barker(log_t: ArrayLike) -> ArrayLike:
    """log g_B(exp(log_t)) = -softplus(-log_t)."""
    log_t = _as_array(log_t, allow_negative=True)
    return _unwrap(-np.logaddexp(0.0, -log_t))


def logistic_cdf(z: ArrayLike) -> ArrayLike:
    """F_L(z) = 1 / (1 + exp(-z)); equals g_B(exp(z))."""
    z = _as_array(z, allow_negative=True)
    return _unwrap(expit(z))


def balancing_residual(g: BalancingFunction, t: ArrayLike) -> ArrayLike:
    """|g(t) - t g(1/t)|, zero for a balancing function."""
    t = _as_array(t)
    with np.errstate(divide="ignore", invalid="ignore"):
        reciprocal = 1.0 / t
        mirrored = t * np.asarray(eval_balancing(g, reciprocal))
    return _unwrap(np.abs(np.asarray(eval_balancing(g, t)) - mirrored))


@dataclass(frozen=True)
class FirstOrderRatio:
    """t*_x(z) = exp(z * beta), the first-order stand-in for pi(x + z) / pi(x)."""

    beta: float

    def log_value(self, z: ArrayLike) -> ArrayLike:
        return _unwrap(np.asarray(z, dtype=float) * self.beta)

    def value(self, z: ArrayLike) -> ArrayLike:
        return _unwrap(np.exp(np.asarray(z, dtype=float) * self.beta))


def constancy_check(g: BalancingFunction, t_grid) -> float:
    """
    Max deviation of (1 + 1/t) g(t) over the grid from its value at t = 1.

    Zero for Barker (the quantity is identically 1); at least 0.5 for Hastings
    on any grid containing 0.5 or 2.
    """
    t = _as_array(t_grid).ravel()
    if np.any(t <= 0):
        raise BalancingError("constancy grid must be strictly positive")
    values = (1.0 + 1.0 / t) * np.asarray(eval_balancing(g, t))
    reference = 2.0 * eval_balancing(g, 1.0)
    return float(np.max(np.abs(values - reference)))


def barker_jump_rate_mc(
    target: TargetDensity,
    x: float,
    proposal_std: float,
    n_samples: int,
    seed: Optional[int] = None,
) -> float:
    """
    Monte Carlo estimate of the jump intensity  E_q[ g_B(t*_x(Z)) ],  Z ~ N(0, proposal_std^2).

    Equals 1/2 for every x, target and proposal_std because q is symmetric.
    """
    if n_samples < 1:
        raise BalancingError("n_samples must be >= 1")
    if target.dim != 1:
        raise BalancingError("jump intensity is defined for 1-D targets")
    beta = target.grad_log_density(np.array([x]))[0]
    rng = np.random.default_rng(seed)
    z = rng.normal(0.0, proposal_std, size=n_samples)
    return float(np.mean(expit(FirstOrderRatio(beta).log_value(z))))
