from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional

import numpy as np

from app.core.logger import get_logger
from app.core.preconditioner import Preconditioner
from app.core.targets import LOG_SQRT_2PI, TargetDensity, TargetError

logger = get_logger("Sampler")


class SamplerError(ValueError):
    """Raised for invalid sampler inputs (unknown kind, shape mismatch, NaN acceptance terms)."""


@dataclass(frozen=True)
class ChainState:
    """Position with its cached log-density and gradient (None for gradient-free samplers)."""
    position: np.ndarray
    log_density: float
    gradient: Optional[np.ndarray]

    @classmethod
    def from_target(cls, target: TargetDensity, x, with_gradient: bool = True) -> "ChainState":
        x = np.asarray(x, dtype=float)
        log_density = target.log_density(x)
        if not np.isfinite(log_density):
            raise TargetError(f"{target.name}: log-density is not finite at {x}")
        gradient = target.grad_log_density(x) if with_gradient else None
        return cls(x, log_density, gradient)


@dataclass(frozen=True)
class MHStepResult:
    proposal: np.ndarray
    log_accept_prob: float
    accepted: bool
    next_state: ChainState
    gradient_blowup: bool = False


def standard_normal_log_pdf(v: np.ndarray) -> float:
    return float(-0.5 * v @ v - v.shape[0] * LOG_SQRT_2PI)


class BaseSampler(ABC):
    """
    Abstract Metropolis-Hastings sampler.

    Subclasses define the proposal and its normalized density; `step` draws,
    evaluates and accepts or rejects. A proposed point where the target or its
    gradient cannot be evaluated is rejected and counted as a blow-up.
    """

    name = "base"
    default_target_accept = 0.5
    uses_gradient = True

    def __init__(self, target: TargetDensity):
        self.target = target
        self.blowup_count = 0

    def initial_state(self, x0) -> ChainState:
        return ChainState.from_target(self.target, x0, self.uses_gradient)

    @abstractmethod
    def propose(self, state: ChainState, precond: Preconditioner, rng: np.random.Generator) -> np.ndarray:
        pass

    @abstractmethod
    def log_proposal_density(self, state: ChainState, y: np.ndarray, precond: Preconditioner) -> float:
        """log q(x, y) of moving from `state` to `y`, normalized in the original coordinates."""
        pass

    def log_accept(self, x_state: ChainState, y_state: ChainState, precond: Preconditioner) -> float:
        log_ratio = (
            y_state.log_density
            + self.log_proposal_density(y_state, x_state.position, precond)
            - x_state.log_density
            - self.log_proposal_density(x_state, y_state.position, precond)
        )
        if np.isnan(log_ratio):
            raise SamplerError("acceptance ratio is NaN")
        return min(0.0, float(log_ratio))

    def step(self, state: ChainState, precond: Preconditioner, rng: np.random.Generator) -> MHStepResult:
        y = self.propose(state, precond, rng)
        try:
            if not np.all(np.isfinite(y)):
                raise TargetError(f"{self.target.name}: proposal is not finite")
            proposed = ChainState.from_target(self.target, y, self.uses_gradient)
            log_alpha = self.log_accept(state, proposed, precond)
        except (TargetError, SamplerError) as e:
            self.blowup_count += 1
            logger.debug(f"{self.name}: rejecting proposal ({e})")
            return MHStepResult(y, -np.inf, False, state, gradient_blowup=True)

        accepted = bool(rng.random() < np.exp(log_alpha))
        return MHStepResult(y, log_alpha, accepted, proposed if accepted else state)

    def _whitened(self, state: ChainState, y: np.ndarray, precond: Preconditioner):
        """Whitened displacement L^{-1}(y - x) and whitened gradient L^T grad at x."""
        z = precond.solve(np.asarray(y, dtype=float) - state.position)
        beta = None if state.gradient is None else precond.apply_transpose(state.gradient)
        return z, beta
