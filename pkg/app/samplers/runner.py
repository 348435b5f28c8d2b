from dataclasses import dataclass
from typing import Dict, List, Optional, Type, Union

import numpy as np
from tqdm.auto import tqdm

from app.core import adapt
from app.core.config import settings
from app.core.logger import get_logger
from app.core.preconditioner import Preconditioner
from app.core.targets import TargetDensity
from app.core.trace_store import AdaptHistory, Trace
from app.samplers.barker import BarkerSampler, GlobalBarkerSampler
from app.samplers.base import BaseSampler, SamplerError
from app.samplers.mala import MalaSampler
from app.samplers.rwm import RandomWalkSampler

logger = get_logger("ChainRunner")

SAMPLERS: Dict[str, Type[BaseSampler]] = {
    RandomWalkSampler.name: RandomWalkSampler,
    MalaSampler.name: MalaSampler,
    BarkerSampler.name: BarkerSampler,
    GlobalBarkerSampler.name: GlobalBarkerSampler,
}

Seed = Union[int, np.random.SeedSequence]


def make_sampler(kind: str, target: TargetDensity) -> BaseSampler:
    try:
        return SAMPLERS[kind](target)
    except KeyError:
        raise SamplerError(f"unknown sampler '{kind}', expected one of {sorted(SAMPLERS)}")


@dataclass(frozen=True)
class AdaptationSettings:
    """Robbins-Monro settings; `target_accept=None` uses the sampler's default."""
    diagonal: bool = True
    target_accept: Optional[float] = None
    learning_exponent: float = 0.6
    use_indicator: bool = False
    covariance_offset: int = 100
    global_scale: Optional[float] = None
    covariance_exponent: Optional[float] = None
    dense_warmup: int = 0


def run_chain(
    target: TargetDensity,
    sampler_kind: str,
    n_iters: int,
    x0=None,
    precond: Union[None, Preconditioner, AdaptationSettings] = None,
    seed: Seed = 0,
    progress: Optional[bool] = None,
) -> Trace:
    """
    Runs one chain of `n_iters` MH steps from `x0` (default: zeros).

    `precond` is a fixed Preconditioner, AdaptationSettings for on-line
    adaptation (updated after every step, rejections included), or None for the
    identity. The chain is a deterministic function of `seed`.
    """
    if n_iters < 1:
        raise SamplerError(f"n_iters must be >= 1, got {n_iters}")
    x0 = np.zeros(target.dim) if x0 is None else np.atleast_1d(np.asarray(x0, dtype=float))
    if x0.shape != (target.dim,):
        raise SamplerError(f"x0 has shape {x0.shape}, target dimension is {target.dim}")

    sampler = make_sampler(sampler_kind, target)
    state = sampler.initial_state(x0)
    rng = np.random.default_rng(seed)

    adapt_state = None
    if isinstance(precond, AdaptationSettings):
        adapt_state = adapt.initial(
            x0,
            target_accept=precond.target_accept or sampler.default_target_accept,
            diagonal=precond.diagonal,
            learning_exponent=precond.learning_exponent,
            use_indicator=precond.use_indicator,
            covariance_offset=precond.covariance_offset,
            global_scale=precond.global_scale,
            covariance_exponent=precond.covariance_exponent,
            dense_warmup=precond.dense_warmup,
        )
        current = adapt.to_preconditioner(adapt_state)
        scales = np.empty(n_iters)
        diagonals = np.empty((n_iters, target.dim))
    elif precond is None:
        current = Preconditioner.identity(target.dim)
    else:
        if precond.dim != target.dim:
            raise SamplerError(f"preconditioner dimension {precond.dim} does not match target {target.dim}")
        current = precond

    samples = np.empty((n_iters, target.dim))
    flags = np.empty(n_iters, dtype=bool)
    probs = np.empty(n_iters)

    show = settings.SHOW_PROGRESS if progress is None else progress
    for i in tqdm(range(n_iters), desc=sampler.name, disable=not show, leave=False):
        result = sampler.step(state, current, rng)
        state = result.next_state
        samples[i] = state.position
        flags[i] = result.accepted
        probs[i] = np.exp(result.log_accept_prob)

        if adapt_state is not None:
            adapt_state = adapt.rm_update(adapt_state, probs[i], state.position, result.accepted)
            current = adapt.to_preconditioner(adapt_state)
            scales[i] = adapt_state.global_scale
            diagonals[i] = adapt_state.covariance_diagonal

    if sampler.blowup_count:
        logger.warning(f"{sampler.name}: {sampler.blowup_count} proposals rejected on non-finite evaluations")

    return Trace(
        samples=samples,
        accept_flags=flags,
        seed=seed if isinstance(seed, (int, np.integer)) else None,
        sampler_label=sampler.name,
        accept_probs=probs,
        adapt_history=None if adapt_state is None else AdaptHistory(scales, diagonals),
        gradient_blowups=sampler.blowup_count,
    )


def run_chains(
    target: TargetDensity,
    sampler_kind: str,
    n_iters: int,
    n_chains: int,
    x0=None,
    precond: Union[None, Preconditioner, AdaptationSettings] = None,
    seed: Seed = 0,
    progress: Optional[bool] = None,
) -> List[Trace]:
    """Independent chains seeded from children of SeedSequence(seed)."""
    if n_chains < 1:
        raise SamplerError(f"n_chains must be >= 1, got {n_chains}")
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return [
        run_chain(target, sampler_kind, n_iters, x0, precond, child, progress)
        for child in root.spawn(n_chains)
    ]
