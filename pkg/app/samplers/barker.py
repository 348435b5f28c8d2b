"""
Barker proposals.

Both variants draw xi ~ N(0, I) in whitened coordinates and flip signs with
logistic probabilities driven by the whitened gradient beta = L^T grad log pi:

- coordinatewise: each b_i = +1 with probability F_L(beta_i xi_i), 2^d candidate moves
- global: one b = +1 with probability F_L(<beta, xi>), two candidate moves x +- L xi

The proposal is y = x + L (b * xi).
"""

import numpy as np
from scipy.special import expit

from app.core.preconditioner import Preconditioner
from app.samplers.base import BaseSampler, ChainState, SamplerError, standard_normal_log_pdf

LOG_2 = np.log(2.0)


def _softplus(u):
    return np.logaddexp(0.0, u)


def barker_log_accept(
    log_pi_x: float,
    log_pi_y: float,
    grad_x: np.ndarray,
    grad_y: np.ndarray,
    z: np.ndarray,
    coordinatewise: bool = True,
) -> float:
    """
    min(0, log pi(y) - log pi(x) + sum[softplus(-beta_x z) - softplus(beta_y z)]).

    `grad_x`, `grad_y` are whitened gradients and `z` the whitened displacement
    L^{-1}(y - x). Each summand is
    log[(1 + exp(-beta_x,i z_i)) / (1 + exp(beta_y,i z_i))]; the global variant
    applies the same expression to the inner products.
    """
    grad_x = np.asarray(grad_x, dtype=float)
    grad_y = np.asarray(grad_y, dtype=float)
    z = np.asarray(z, dtype=float)
    if np.isnan(log_pi_x) or np.isnan(log_pi_y) or np.any(np.isnan(grad_x)) or np.any(np.isnan(grad_y)) or np.any(np.isnan(z)):
        raise SamplerError("NaN passed to barker_log_accept")

    if coordinatewise:
        u_x, u_y = grad_x * z, grad_y * z
    else:
        u_x, u_y = grad_x @ z, grad_y @ z
    correction = float(np.sum(_softplus(-u_x) - _softplus(u_y)))
    return min(0.0, log_pi_y - log_pi_x + correction)


class BarkerSampler(BaseSampler):
    """Barker proposal with an independent sign flip per coordinate."""

    name = "barker"
    default_target_accept = 0.57
    coordinatewise = True

    def _flip_logits(self, beta: np.ndarray, xi: np.ndarray):
        return beta * xi

    def propose(self, state: ChainState, precond: Preconditioner, rng: np.random.Generator) -> np.ndarray:
        beta = precond.apply_transpose(state.gradient)
        xi = rng.standard_normal(precond.dim)
        logits = self._flip_logits(beta, xi)
        b = np.where(rng.random(np.shape(logits)) < expit(logits), 1.0, -1.0)
        return state.position + precond.apply(b * xi)

    def log_proposal_density(self, state: ChainState, y: np.ndarray, precond: Preconditioner) -> float:
        z, beta = self._whitened(state, y, precond)
        logits = self._flip_logits(beta, z)
        log_skew = np.sum(LOG_2 - _softplus(-logits))
        return float(log_skew + standard_normal_log_pdf(z) - precond.log_det_factor())

    def log_accept(self, x_state: ChainState, y_state: ChainState, precond: Preconditioner) -> float:
        z = precond.solve(y_state.position - x_state.position)
        return barker_log_accept(
            x_state.log_density,
            y_state.log_density,
            precond.apply_transpose(x_state.gradient),
            precond.apply_transpose(y_state.gradient),
            z,
            coordinatewise=self.coordinatewise,
        )


class GlobalBarkerSampler(BarkerSampler):
    """Barker proposal with a single sign flip for the whole innovation vector."""

    name = "barker-global"
    coordinatewise = False

    def _flip_logits(self, beta: np.ndarray, xi: np.ndarray):
        return beta @ xi
