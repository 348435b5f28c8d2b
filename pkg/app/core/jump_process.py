"""
Continuous-time Barker dynamics on the real line.

Jumps arrive at the constant rate 1/2. Each jump draws xi from a symmetric
base law q and keeps its sign with probability F_L(beta * xi), where beta is the
gradient of log pi at the current state. The resulting increment has density
2 F_L(beta z) q(z).
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import pandas as pd
from scipy.integrate import cumulative_trapezoid
from scipy.special import expit
from scipy.stats import norm

from app.core.targets import TargetDensity, TargetError
from app.core.trace_store import Trace

JUMP_RATE = 0.5


class JumpProcessError(ValueError):
    """Raised when a path cannot be continued (bad arguments or non-finite gradient)."""


class IncrementLaw(ABC):
    """Symmetric 1-D base law q with a sampler."""

    @abstractmethod
    def sample(self, rng: np.random.Generator, size=None):
        pass

    @abstractmethod
    def pdf(self, z):
        pass

    @property
    @abstractmethod
    def half_width(self) -> float:
        """Half-width of an interval holding all but a negligible share of the mass."""


@dataclass(frozen=True)
class GaussianIncrement(IncrementLaw):
    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise JumpProcessError(f"increment scale must be positive, got {self.scale}")

    def sample(self, rng: np.random.Generator, size=None):
        return rng.normal(0.0, self.scale, size=size)

    def pdf(self, z):
        return norm.pdf(z, scale=self.scale)

    @property
    def half_width(self) -> float:
        return 12.0 * self.scale


@dataclass(frozen=True)
class BimodalIncrement(IncrementLaw):
    """Equal mixture of N(offset, scale^2) and N(-offset, scale^2)."""

    offset: float = 1.0
    scale: float = 0.5

    def __post_init__(self):
        if not self.scale > 0 or self.offset < 0:
            raise JumpProcessError(
                f"bimodal increment needs scale > 0 and offset >= 0, got {self.scale}, {self.offset}"
            )

    def sample(self, rng: np.random.Generator, size=None):
        signs = np.where(rng.random(size) < 0.5, -1.0, 1.0)
        return signs * self.offset + rng.normal(0.0, self.scale, size=size)

    def pdf(self, z):
        return 0.5 * (norm.pdf(z, loc=self.offset, scale=self.scale) + norm.pdf(z, loc=-self.offset, scale=self.scale))

    @property
    def half_width(self) -> float:
        return self.offset + 12.0 * self.scale


def flip_probability(beta, xi):
    """P(b = +1 | xi) = F_L(beta * xi)."""
    return expit(np.asarray(beta, dtype=float) * xi)


def sample_skew_symmetric_increment(beta: float, base_q: IncrementLaw, rng: np.random.Generator) -> float:
    xi = float(base_q.sample(rng))
    b = 1.0 if rng.random() < flip_probability(beta, xi) else -1.0
    return b * xi


def sample_skew_symmetric_increments(beta, base_q: IncrementLaw, rng: np.random.Generator, size) -> np.ndarray:
    """Vectorized form; `beta` is a scalar or an array of shape `size`."""
    xi = base_q.sample(rng, size=size)
    keep = rng.random(size) < flip_probability(beta, xi)
    return np.where(keep, xi, -xi)


def jump_kernel_density(x: float, z, beta: float, base_q: IncrementLaw):
    """
    j*(x, x + z) = 2 F_L(beta z) q(z).

    `x` enters only through `beta`, the gradient of log pi at x.
    """
    return 2.0 * expit(beta * np.asarray(z, dtype=float)) * base_q.pdf(z)


def flip_decomposition_density(z, beta: float, base_q: IncrementLaw):
    """Mass reaching z by keeping xi = z plus mass reaching it by flipping xi = -z."""
    z = np.asarray(z, dtype=float)
    return base_q.pdf(z) * expit(beta * z) + base_q.pdf(-z) * (1.0 - expit(-beta * z))


def skew_symmetric_cdf(beta: float, base_q: IncrementLaw, n_grid: int = 20001) -> Callable:
    """CDF of the increment law, tabulated by trapezoid quadrature and interpolated."""
    width = base_q.half_width
    grid = np.linspace(-width, width, n_grid)
    cdf = cumulative_trapezoid(jump_kernel_density(0.0, grid, beta, base_q), grid, initial=0.0)
    return lambda z: np.interp(z, grid, cdf, left=0.0, right=1.0)


@dataclass(frozen=True)
class JumpPath:
    times: np.ndarray  # event times, strictly increasing
    states: np.ndarray  # initial state followed by the state after each event
    total_duration: float

    @property
    def n_events(self) -> int:
        return self.times.shape[0]

    @property
    def holding_times(self) -> np.ndarray:
        """Time spent in each state; the last interval is censored at total_duration."""
        return np.diff(np.concatenate([[0.0], self.times, [self.total_duration]]))

    def time_average(self, fn: Callable = lambda x: x) -> float:
        values = np.asarray(fn(self.states), dtype=float)
        return float(np.sum(values * self.holding_times) / self.total_duration)

    def window_counts(self, width: float) -> np.ndarray:
        """Event counts in consecutive windows of `width`; a trailing partial window is dropped."""
        n_windows = int(self.total_duration // width)
        if n_windows < 1:
            raise JumpProcessError(f"window width {width} exceeds path duration {self.total_duration}")
        counts, _ = np.histogram(self.times, bins=np.arange(n_windows + 1) * width)
        return counts

    def to_csv(self, path: str):
        pd.DataFrame({
            "event_time": np.concatenate([[0.0], self.times]),
            "state": self.states,
        }).to_csv(path, index=False)


def _scalar_gradient(target: TargetDensity, x: float) -> float:
    try:
        return float(target.grad_log_density(np.array([x]))[0])
    except TargetError as e:
        raise JumpProcessError(f"gradient is not finite at state {x}: {e}")


def _check_1d(target: TargetDensity):
    if target.dim != 1:
        raise JumpProcessError(f"jump processes are simulated in 1-D, target has dim {target.dim}")


def simulate_jump_process(
    target: TargetDensity,
    base_q: IncrementLaw,
    duration: float,
    x0: float,
    rng: np.random.Generator,
    clock_rng: Optional[np.random.Generator] = None,
    rate: float = JUMP_RATE,
) -> JumpPath:
    """
    Event-driven simulation over [0, duration].

    Holding times come from `clock_rng` when given, else from `rng`. With a
    separate clock, the jump states match `skeleton_chain` run on the same
    increment generator.
    """
    if not duration > 0:
        raise JumpProcessError(f"duration must be positive, got {duration}")
    _check_1d(target)
    clock = clock_rng if clock_rng is not None else rng

    t = 0.0
    x = float(x0)
    times, states = [], [x]
    while True:
        t += clock.exponential(1.0 / rate)
        if t > duration:
            break
        x += sample_skew_symmetric_increment(_scalar_gradient(target, x), base_q, rng)
        times.append(t)
        states.append(x)

    return JumpPath(times=np.array(times), states=np.array(states), total_duration=float(duration))


def skeleton_chain(
    target: TargetDensity,
    base_q: IncrementLaw,
    n_steps: int,
    x0: float,
    rng: np.random.Generator,
) -> Trace:
    """The jump kernel used as a discrete-time chain, no MH correction."""
    if n_steps < 1:
        raise JumpProcessError(f"n_steps must be >= 1, got {n_steps}")
    _check_1d(target)

    x = float(x0)
    samples = np.empty((n_steps, 1))
    for i in range(n_steps):
        x += sample_skew_symmetric_increment(_scalar_gradient(target, x), base_q, rng)
        samples[i, 0] = x
    return Trace(
        samples=samples,
        accept_flags=np.ones(n_steps, dtype=bool),
        seed=None,
        sampler_label="skeleton",
    )


@dataclass(frozen=True)
class EnsembleResult:
    second_moments: np.ndarray
    event_counts: np.ndarray

    @property
    def mean_second_moment(self) -> float:
        return float(np.mean(self.second_moments))

    @property
    def standard_error(self) -> float:
        return float(np.std(self.second_moments, ddof=1) / np.sqrt(len(self.second_moments)))


def simulate_jump_ensemble(
    target: TargetDensity,
    base_q: IncrementLaw,
    duration: float,
    x0s,
    rng: np.random.Generator,
    continuous: bool = True,
) -> EnsembleResult:
    """
    Advances independent paths, one per entry of `x0s`, together.

    With `continuous=True` each path reports the time average of x^2 over
    [0, duration]; otherwise the plain average over visited states (the
    skeleton chain's estimate).
    """
    if not duration > 0:
        raise JumpProcessError(f"duration must be positive, got {duration}")
    _check_1d(target)

    x = np.array(x0s, dtype=float).ravel()
    m = x.shape[0]
    clock = np.zeros(m)
    weighted = np.zeros(m)
    visits = np.ones(m)
    counts = np.zeros(m, dtype=int)
    if not continuous:
        weighted = x ** 2

    active = np.arange(m)
    while active.size:
        hold = rng.exponential(1.0 / JUMP_RATE, size=active.size)
        remaining = duration - clock[active]
        if continuous:
            weighted[active] += x[active] ** 2 * np.minimum(hold, remaining)
        clock[active] += hold
        active = active[clock[active] <= duration]
        if not active.size:
            break

        beta = target.grad_log_density_batch(x[active])[:, 0]
        if not np.all(np.isfinite(beta)):
            bad = x[active][~np.isfinite(beta)][0]
            raise JumpProcessError(f"gradient is not finite at state {bad}")
        x[active] += sample_skew_symmetric_increments(beta, base_q, rng, active.size)
        counts[active] += 1
        if not continuous:
            weighted[active] += x[active] ** 2
            visits[active] += 1

    second_moments = weighted / duration if continuous else weighted / visits
    return EnsembleResult(second_moments=second_moments, event_counts=counts)
