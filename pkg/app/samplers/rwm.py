import numpy as np

from app.core.preconditioner import Preconditioner
from app.samplers.base import BaseSampler, ChainState, SamplerError, standard_normal_log_pdf


class RandomWalkSampler(BaseSampler):
    """Gaussian random-walk Metropolis: y = x + L xi."""

    name = "rwm"
    default_target_accept = 0.234
    uses_gradient = False

    def propose(self, state: ChainState, precond: Preconditioner, rng: np.random.Generator) -> np.ndarray:
        return state.position + precond.apply(rng.standard_normal(precond.dim))

    def log_proposal_density(self, state: ChainState, y: np.ndarray, precond: Preconditioner) -> float:
        z, _ = self._whitened(state, y, precond)
        return standard_normal_log_pdf(z) - precond.log_det_factor()

    def log_accept(self, x_state: ChainState, y_state: ChainState, precond: Preconditioner) -> float:
        # symmetric proposal
        log_ratio = y_state.log_density - x_state.log_density
        if np.isnan(log_ratio):
            raise SamplerError("acceptance ratio is NaN")
        return min(0.0, float(log_ratio))
