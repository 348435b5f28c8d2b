"""
Brute-force oracles for the MH kernels: pointwise detailed balance, sign
enumeration of the coordinatewise Barker density, and the transition matrix
of a 1-D target restricted to a grid.
"""

import itertools
from typing import Callable, Optional

import numpy as np
from scipy.special import expit
from scipy.stats import norm

from app.core.preconditioner import Preconditioner
from app.samplers.base import BaseSampler, ChainState, SamplerError


def _identity_if_none(precond: Optional[Preconditioner], dim: int) -> Preconditioner:
    return Preconditioner.identity(dim) if precond is None else precond


def reversibility_check(
    sampler: BaseSampler,
    target,
    x,
    y,
    precond: Optional[Preconditioner] = None,
) -> float:
    """
    |log[pi(x) q(x, y) alpha(x, y)] - log[pi(y) q(y, x) alpha(y, x)]|.

    Returns 0 when the move is impossible in both directions.
    """
    precond = _identity_if_none(precond, target.dim)
    x_state = ChainState.from_target(target, x, sampler.uses_gradient)
    y_state = ChainState.from_target(target, y, sampler.uses_gradient)

    log_alpha_xy = sampler.log_accept(x_state, y_state, precond)
    log_alpha_yx = sampler.log_accept(y_state, x_state, precond)
    if log_alpha_xy == -np.inf and log_alpha_yx == -np.inf:
        return 0.0

    forward = x_state.log_density + sampler.log_proposal_density(x_state, y_state.position, precond) + log_alpha_xy
    backward = y_state.log_density + sampler.log_proposal_density(y_state, x_state.position, precond) + log_alpha_yx
    return float(abs(forward - backward))


def enumerated_proposal_density(beta, z, base_pdf: Callable = norm.pdf) -> float:
    """
    Density of z = b * xi for the coordinatewise flip, summed over all 2^d sign
    vectors: the sign vector s produces z exactly when xi = s * z and b = s.
    """
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    z = np.atleast_1d(np.asarray(z, dtype=float))
    total = 0.0
    for signs in itertools.product((1.0, -1.0), repeat=z.shape[0]):
        s = np.array(signs)
        xi = s * z
        # P(b = s) = expit(s * beta * xi), evaluated without 1 - expit cancellation
        p_signs = expit(s * beta * xi)
        total += float(np.prod(base_pdf(xi) * p_signs))
    return total


def transition_matrix(sampler: BaseSampler, grid, precond: Optional[Preconditioner] = None) -> np.ndarray:
    """
    MH kernel of a 1-D target restricted to an evenly spaced grid.

    Off-diagonal entries are q(x_i, x_j) * spacing * alpha(x_i, x_j); the
    diagonal holds the remaining mass.
    """
    grid = np.asarray(grid, dtype=float)
    if sampler.target.dim != 1:
        raise SamplerError("transition matrix oracle needs a 1-D target")
    spacing = grid[1] - grid[0]
    if not np.allclose(np.diff(grid), spacing):
        raise SamplerError("grid must be evenly spaced")
    precond = _identity_if_none(precond, 1)

    states = [ChainState.from_target(sampler.target, [g], sampler.uses_gradient) for g in grid]
    m = grid.shape[0]
    P = np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            log_q = sampler.log_proposal_density(states[i], states[j].position, precond)
            log_alpha = sampler.log_accept(states[i], states[j], precond)
            P[i, j] = np.exp(log_q + log_alpha) * spacing
        P[i, i] = 1.0 - P[i].sum()
        if P[i, i] < 0:
            raise SamplerError(f"row {i} leaks more than unit mass; refine the grid")
    return P


def stationary_vector(P: np.ndarray, tol: float = 1e-13, max_iter: int = 200000) -> np.ndarray:
    """Left fixed point of P by power iteration from the uniform vector."""
    v = np.full(P.shape[0], 1.0 / P.shape[0])
    for _ in range(max_iter):
        nxt = v @ P
        nxt /= nxt.sum()
        if np.abs(nxt - v).sum() < tol:
            return nxt
        v = nxt
    raise SamplerError(f"power iteration did not converge in {max_iter} steps")
