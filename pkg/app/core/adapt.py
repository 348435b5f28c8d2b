"""
Robbins-Monro adaptation of the global scale lambda and covariance Sigma.

The state is immutable: `rm_update` returns a new AdaptState so a chain's
adaptation history is a sequence of snapshots.
"""

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from app.core.preconditioner import Preconditioner, PreconditionerError

OPTIMAL_SCALE_CONSTANT = 2.38
MIN_REGULARIZATION = 1e-10
RELATIVE_REGULARIZATION = 1e-6


class AdaptError(ValueError):
    """Raised when adaptation receives invalid input or produces an unusable preconditioner."""


@dataclass(frozen=True)
class AdaptState:
    iteration: int
    log_global_scale: float
    running_mean: np.ndarray
    running_cov: np.ndarray  # (d,) in diagonal mode, (d, d) otherwise
    target_accept: float
    learning_exponent: float = 0.6
    use_indicator: bool = False
    covariance_offset: int = 100
    covariance_exponent: Optional[float] = None  # None: same as learning_exponent
    dense_warmup: int = 0

    @property
    def diagonal(self) -> bool:
        return self.running_cov.ndim == 1

    @property
    def covariance_learning_exponent(self) -> float:
        return self.learning_exponent if self.covariance_exponent is None else self.covariance_exponent

    @property
    def warming_up(self) -> bool:
        """Dense mode preconditions with diag(Sigma) until `dense_warmup` updates have run."""
        return not self.diagonal and self.iteration < self.dense_warmup

    @property
    def global_scale(self) -> float:
        return float(np.exp(self.log_global_scale))

    @property
    def covariance_diagonal(self) -> np.ndarray:
        return self.running_cov if self.diagonal else np.diag(self.running_cov)

    @property
    def regularization(self) -> float:
        return max(RELATIVE_REGULARIZATION * float(np.mean(self.covariance_diagonal)), MIN_REGULARIZATION)


def initial(
    x0,
    target_accept: float,
    diagonal: bool = True,
    learning_exponent: float = 0.6,
    use_indicator: bool = False,
    covariance_offset: int = 100,
    global_scale: Optional[float] = None,
    covariance_exponent: Optional[float] = None,
    dense_warmup: int = 0,
) -> AdaptState:
    """lambda_0 = 2.38 / sqrt(d) unless given, Sigma_0 = I, mean_0 = x0."""
    x0 = np.asarray(x0, dtype=float)
    d = x0.shape[0]
    if not 0.0 < target_accept < 1.0:
        raise AdaptError(f"target acceptance must lie in (0, 1), got {target_accept}")
    if not 0.5 < learning_exponent <= 1.0:
        raise AdaptError(f"learning exponent must lie in (0.5, 1], got {learning_exponent}")
    if covariance_exponent is not None and not 0.5 < covariance_exponent <= 1.0:
        raise AdaptError(f"covariance exponent must lie in (0.5, 1], got {covariance_exponent}")
    if covariance_offset < 0 or dense_warmup < 0:
        raise AdaptError("covariance offset and dense warm-up must be non-negative")
    scale = OPTIMAL_SCALE_CONSTANT / np.sqrt(d) if global_scale is None else global_scale
    return AdaptState(
        iteration=0,
        log_global_scale=float(np.log(scale)),
        running_mean=x0.copy(),
        running_cov=np.ones(d) if diagonal else np.eye(d),
        target_accept=float(target_accept),
        learning_exponent=float(learning_exponent),
        use_indicator=use_indicator,
        covariance_offset=int(covariance_offset),
        covariance_exponent=None if covariance_exponent is None else float(covariance_exponent),
        dense_warmup=int(dense_warmup),
    )


def learning_rate(t: int, exponent: float = 0.6) -> float:
    if t < 1:
        raise AdaptError(f"learning rate is defined for t >= 1, got {t}")
    return float(t) ** (-exponent)


def rm_update(
    adapt: AdaptState,
    accept_prob: float,
    new_sample,
    accepted: Optional[bool] = None,
) -> AdaptState:
    """
    One Robbins-Monro step at t = iteration + 1.

    The scale moves by learning_rate(t) * (statistic - target_accept), where the
    statistic is `accept_prob` or, with `use_indicator`, the 0/1 outcome. Mean
    and covariance use learning_rate(t + covariance_offset, covariance exponent).

    With covariance_offset = 0 and no covariance_exponent every update uses
    learning_rate(t), the plain Robbins-Monro schedule; the first step then
    replaces the mean by the sample and Sigma by a rank-one matrix.
    """
    new_sample = np.asarray(new_sample, dtype=float)
    if np.isnan(accept_prob) or not 0.0 <= accept_prob <= 1.0:
        raise AdaptError(f"acceptance probability must lie in [0, 1], got {accept_prob}")
    if not np.all(np.isfinite(new_sample)):
        raise AdaptError(f"sample has non-finite components: {new_sample}")
    if new_sample.shape != adapt.running_mean.shape:
        raise AdaptError(f"sample shape {new_sample.shape} does not match state {adapt.running_mean.shape}")

    if adapt.use_indicator:
        if accepted is None:
            raise AdaptError("indicator adaptation needs the accept outcome")
        statistic = 1.0 if accepted else 0.0
    else:
        statistic = accept_prob

    t = adapt.iteration + 1
    gamma = learning_rate(t, adapt.learning_exponent)
    gamma_cov = learning_rate(t + adapt.covariance_offset, adapt.covariance_learning_exponent)

    diff = new_sample - adapt.running_mean
    if adapt.diagonal:
        cov = adapt.running_cov + gamma_cov * (diff ** 2 - adapt.running_cov)
    else:
        cov = adapt.running_cov + gamma_cov * (np.outer(diff, diff) - adapt.running_cov)
        cov = 0.5 * (cov + cov.T)

    return replace(
        adapt,
        iteration=t,
        log_global_scale=adapt.log_global_scale + gamma * (statistic - adapt.target_accept),
        running_mean=adapt.running_mean + gamma_cov * diff,
        running_cov=cov,
    )


def to_preconditioner(adapt: AdaptState) -> Preconditioner:
    """lambda = exp(log scale), Sigma = running_cov + eps I (its diagonal while warming up)."""
    eps = adapt.regularization
    if adapt.diagonal or adapt.warming_up:
        cov = adapt.covariance_diagonal + eps
    else:
        cov = adapt.running_cov + eps * np.eye(adapt.running_cov.shape[0])
    try:
        return Preconditioner.from_covariance(adapt.global_scale, cov)
    except PreconditionerError as e:
        raise AdaptError(f"adapted covariance could not be factored at iteration {adapt.iteration}: {e}")
