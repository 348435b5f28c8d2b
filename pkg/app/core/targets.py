"""
Target densities.

Every target supplies a log-density, defined only up to an additive constant,
and its gradient. Samplers never need normalizing constants because all
acceptance ratios are differences of log-densities.
"""

from abc import ABC, abstractmethod
from typing import Optional

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.optimize import brentq
from scipy.special import erfcx, expit, log_ndtr

LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)
SQRT_2_OVER_PI = np.sqrt(2.0 / np.pi)


class TargetError(ValueError):
    """Raised for invalid target inputs (shape, non-finite values, off-support points)."""


class TargetDensity(ABC):
    """Abstract base class for all targets. Instances are immutable after construction."""

    name = "target"

    def __init__(self, dim: int):
        if dim < 1:
            raise TargetError(f"dimension must be positive, got {dim}")
        self.dim = int(dim)

    def log_density(self, x) -> float:
        """log pi(x) + C for a fixed unknown constant C."""
        return float(self._log_density(self._validate(x)))

    def grad_log_density(self, x) -> np.ndarray:
        x = self._validate(x)
        grad = np.asarray(self._grad_log_density(x), dtype=float)
        if not np.all(np.isfinite(grad)):
            raise TargetError(f"{self.name}: gradient is not finite at {x}")
        return grad

    def grad_log_density_batch(self, xs: np.ndarray) -> np.ndarray:
        """Gradients at each row of `xs` (shape (m, dim))."""
        xs = np.asarray(xs, dtype=float).reshape(-1, self.dim)
        return np.array([self.grad_log_density(x) for x in xs])

    def _validate(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.ndim != 1 or x.shape[0] != self.dim:
            raise TargetError(
                f"{self.name}: expected a vector of length {self.dim}, got shape {x.shape}"
            )
        if not np.all(np.isfinite(x)):
            raise TargetError(f"{self.name}: input has non-finite components: {x}")
        return x

    @abstractmethod
    def _log_density(self, x: np.ndarray) -> float:
        pass

    @abstractmethod
    def _grad_log_density(self, x: np.ndarray) -> np.ndarray:
        pass


class GaussianTarget(TargetDensity):
    """Multivariate normal N(mean, covariance), normalized."""

    name = "gaussian"

    def __init__(self, mean: np.ndarray, covariance: np.ndarray):
        mean = np.atleast_1d(np.asarray(mean, dtype=float))
        covariance = np.atleast_2d(np.asarray(covariance, dtype=float))
        super().__init__(mean.shape[0])
        if covariance.shape != (self.dim, self.dim):
            raise TargetError(
                f"covariance shape {covariance.shape} does not match mean length {self.dim}"
            )
        try:
            chol = cho_factor(covariance, lower=True)
        except np.linalg.LinAlgError as e:
            raise TargetError(f"covariance is not positive definite: {e}")
        self.mean = mean
        self.covariance = covariance
        self.precision = cho_solve(chol, np.eye(self.dim))
        self._log_norm = -self.dim * LOG_SQRT_2PI - np.sum(np.log(np.diag(chol[0])))

    def _log_density(self, x: np.ndarray) -> float:
        r = x - self.mean
        return self._log_norm - 0.5 * r @ self.precision @ r

    def _grad_log_density(self, x: np.ndarray) -> np.ndarray:
        return -self.precision @ (x - self.mean)

    def grad_log_density_batch(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float).reshape(-1, self.dim)
        return -(xs - self.mean) @ self.precision


class SkewNormalTarget(TargetDensity):
    """
    Skew-normal density 2 phi(z) Phi(eta z) on the real line.

    Phi is evaluated in log space (log_ndtr) and the Mills ratio phi/Phi through
    the scaled complementary error function, so the gradient stays finite for
    arbitrarily large eta.
    """

    name = "skew-normal"

    def __init__(self, eta: float):
        if not np.isfinite(eta) or eta < 0:
            raise TargetError(f"skewness eta must be finite and >= 0, got {eta}")
        super().__init__(1)
        self.eta = float(eta)

    @staticmethod
    def mills_ratio(u):
        """phi(u) / Phi(u), stable for large |u|."""
        return SQRT_2_OVER_PI / erfcx(-np.asarray(u, dtype=float) / np.sqrt(2.0))

    def _log_density(self, x: np.ndarray) -> float:
        z = x[0]
        return np.log(2.0) - 0.5 * z * z - LOG_SQRT_2PI + log_ndtr(self.eta * z)

    def _grad_log_density(self, x: np.ndarray) -> np.ndarray:
        z = x[0]
        if self.eta == 0.0:
            return np.array([-z])
        return np.array([-z + self.eta * self.mills_ratio(self.eta * z)])

    def grad_log_density_batch(self, xs: np.ndarray) -> np.ndarray:
        z = np.asarray(xs, dtype=float).reshape(-1, 1)
        if self.eta == 0.0:
            return -z
        return -z + self.eta * self.mills_ratio(self.eta * z)

    def mode(self) -> float:
        if self.eta == 0.0:
            return 0.0
        return float(brentq(lambda z: self._grad_log_density(np.array([z]))[0], 0.0, 10.0, xtol=1e-14))


class LogisticRegressionPosterior(TargetDensity):
    """
    Bayesian logistic regression with an isotropic N(0, prior_variance I) prior.

    The log-likelihood uses softplus (np.logaddexp) so it stays finite for any
    linear predictor; the gradient is analytic: X^T (y - sigmoid(X b)) - b / prior_variance.
    """

    name = "logistic"

    def __init__(self, design_matrix: np.ndarray, labels: np.ndarray, prior_variance: float = 25.0):
        X = np.asarray(design_matrix, dtype=float)
        y = np.asarray(labels, dtype=float)
        if X.ndim != 2:
            raise TargetError(f"design matrix must be 2-D, got shape {X.shape}")
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise TargetError(
                f"labels shape {y.shape} does not match design matrix rows {X.shape[0]}"
            )
        if not np.all((y == 0.0) | (y == 1.0)):
            raise TargetError("labels must take values in {0, 1}")
        if not np.all(np.isfinite(X)):
            raise TargetError("design matrix has non-finite entries")
        if not prior_variance > 0:
            raise TargetError(f"prior variance must be positive, got {prior_variance}")
        super().__init__(X.shape[1])
        self.design_matrix = X
        self.labels = y
        self.prior_variance = float(prior_variance)

    def _log_density(self, x: np.ndarray) -> float:
        eta = self.design_matrix @ x
        log_lik = np.sum(self.labels * eta - np.logaddexp(0.0, eta))
        return log_lik - 0.5 * x @ x / self.prior_variance

    def _grad_log_density(self, x: np.ndarray) -> np.ndarray:
        eta = self.design_matrix @ x
        return self.design_matrix.T @ (self.labels - expit(eta)) - x / self.prior_variance

    def hessian(self, x: np.ndarray) -> np.ndarray:
        x = self._validate(x)
        p = expit(self.design_matrix @ x)
        weighted = self.design_matrix * (p * (1.0 - p))[:, None]
        return -self.design_matrix.T @ weighted - np.eye(self.dim) / self.prior_variance

    def find_mode(self, tol: float = 1e-8, max_iter: int = 100) -> np.ndarray:
        """Damped Newton ascent; the posterior is strictly log-concave so the mode is unique."""
        beta = np.zeros(self.dim)
        for _ in range(max_iter):
            grad = self.grad_log_density(beta)
            if np.linalg.norm(grad) < tol:
                return beta
            step = cho_solve(cho_factor(-self.hessian(beta), lower=True), grad)
            current = self.log_density(beta)
            t = 1.0
            while t > 1e-12 and self.log_density(beta + t * step) < current + 1e-4 * t * grad @ step:
                t *= 0.5
            beta = beta + t * step
        raise TargetError(f"mode search did not converge in {max_iter} iterations")


def make_gaussian(dim: int, scales: Optional[np.ndarray] = None, mean: Optional[np.ndarray] = None) -> GaussianTarget:
    """Standard (scales=None) or diagonal-anisotropic Gaussian."""
    scales = np.ones(dim) if scales is None else np.asarray(scales, dtype=float)
    mean = np.zeros(dim) if mean is None else mean
    return GaussianTarget(mean, np.diag(scales ** 2))


def make_skew_normal(eta: float) -> SkewNormalTarget:
    return SkewNormalTarget(eta)


def make_logistic_posterior(X: np.ndarray, y: np.ndarray, prior_variance: float = 25.0) -> LogisticRegressionPosterior:
    return LogisticRegressionPosterior(X, y, prior_variance)


def fd_gradient_check(target: TargetDensity, x, h: float = 1e-6) -> float:
    """
    Max over coordinates of |central difference - analytic gradient| / max(1, |gradient|).

    The step for coordinate i is h * max(1, |x_i|).
    """
    x = target._validate(x)
    grad = target.grad_log_density(x)
    worst = 0.0
    for i in range(target.dim):
        step = h * max(1.0, abs(x[i]))
        offset = np.zeros(target.dim)
        offset[i] = step
        fd = (target.log_density(x + offset) - target.log_density(x - offset)) / (2.0 * step)
        worst = max(worst, abs(fd - grad[i]) / max(1.0, abs(grad[i])))
    return worst
