"""
Preconditioning matrix lambda^2 Sigma and its lower-triangular factor L.

Samplers work in whitened coordinates: an innovation v maps to the
displacement L v, and the gradient maps to L^T grad.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular


class PreconditionerError(ValueError):
    """Raised when lambda^2 Sigma cannot be factored."""


@dataclass(frozen=True)
class Preconditioner:
    global_scale: float
    covariance: np.ndarray  # (d, d) dense or (d,) diagonal
    factor: np.ndarray  # same shape as covariance

    @classmethod
    def from_covariance(cls, global_scale: float, covariance) -> "Preconditioner":
        if not np.isfinite(global_scale) or global_scale <= 0:
            raise PreconditionerError(f"global scale must be positive and finite, got {global_scale}")
        covariance = np.asarray(covariance, dtype=float)
        if not np.all(np.isfinite(covariance)):
            raise PreconditionerError("covariance has non-finite entries")

        if covariance.ndim == 1:
            if np.any(covariance <= 0):
                raise PreconditionerError("diagonal covariance must be strictly positive")
            factor = global_scale * np.sqrt(covariance)
        elif covariance.ndim == 2 and covariance.shape[0] == covariance.shape[1]:
            try:
                factor = np.linalg.cholesky(global_scale ** 2 * covariance)
            except np.linalg.LinAlgError as e:
                raise PreconditionerError(f"covariance is not positive definite: {e}")
        else:
            raise PreconditionerError(f"covariance must be (d,) or (d, d), got shape {covariance.shape}")
        return cls(float(global_scale), covariance, factor)

    @classmethod
    def identity(cls, dim: int, global_scale: float = 1.0, diagonal: bool = True) -> "Preconditioner":
        covariance = np.ones(dim) if diagonal else np.eye(dim)
        return cls.from_covariance(global_scale, covariance)

    @property
    def diagonal(self) -> bool:
        return self.covariance.ndim == 1

    @property
    def dim(self) -> int:
        return self.covariance.shape[0]

    def apply(self, v: np.ndarray) -> np.ndarray:
        """L v"""
        return self.factor * v if self.diagonal else self.factor @ v

    def apply_transpose(self, v: np.ndarray) -> np.ndarray:
        """L^T v"""
        return self.factor * v if self.diagonal else self.factor.T @ v

    def solve(self, v: np.ndarray) -> np.ndarray:
        """L^{-1} v"""
        if self.diagonal:
            return v / self.factor
        return solve_triangular(self.factor, v, lower=True)

    def log_det_factor(self) -> float:
        diag = self.factor if self.diagonal else np.diag(self.factor)
        return float(np.sum(np.log(diag)))

    def matrix(self) -> np.ndarray:
        """lambda^2 Sigma as a dense matrix."""
        cov = np.diag(self.covariance) if self.diagonal else self.covariance
        return self.global_scale ** 2 * cov

    def reconstruction_error(self) -> float:
        """Relative Frobenius error of L L^T against lambda^2 Sigma."""
        L = np.diag(self.factor) if self.diagonal else self.factor
        target = self.matrix()
        return float(np.linalg.norm(L @ L.T - target) / np.linalg.norm(target))
