import numpy as np

from app.core.preconditioner import Preconditioner
from app.samplers.base import BaseSampler, ChainState, standard_normal_log_pdf


class MalaSampler(BaseSampler):
    """
    Metropolis-adjusted Langevin: y = x + (1/2) L L^T grad + L xi.

    In whitened coordinates the proposal is N(beta / 2, I) with beta = L^T grad,
    so the reverse density is evaluated with the gradient at y.
    """

    name = "mala"
    default_target_accept = 0.574

    def propose(self, state: ChainState, precond: Preconditioner, rng: np.random.Generator) -> np.ndarray:
        beta = precond.apply_transpose(state.gradient)
        return state.position + precond.apply(0.5 * beta + rng.standard_normal(precond.dim))

    def log_proposal_density(self, state: ChainState, y: np.ndarray, precond: Preconditioner) -> float:
        z, beta = self._whitened(state, y, precond)
        return standard_normal_log_pdf(z - 0.5 * beta) - precond.log_det_factor()
