"""
Chain diagnostics: effective sample size, split R-hat, acceptance rates and the
per-scenario summary row written to summary.csv.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from app.core.trace_store import SUMMARY_COLUMNS, Trace

MIN_SERIES_LENGTH = 100
RHAT_THRESHOLD = 1.1
MAX_ESS_RATIO = 1.05


class DiagnosticsError(ValueError):
    """Raised for series that cannot be summarized (too short, constant)."""


def autocorrelation(series: np.ndarray) -> np.ndarray:
    """Sample autocorrelation at every lag, via FFT."""
    x = np.asarray(series, dtype=float)
    n = x.shape[0]
    xc = x - x.mean()
    n_fft = 1 << (2 * n - 1).bit_length()
    spectrum = np.fft.rfft(xc, n=n_fft)
    acov = np.fft.irfft(spectrum * np.conj(spectrum), n=n_fft)[:n] / n
    return acov / acov[0]


def _check_series(x: np.ndarray):
    if x.ndim != 1 or x.shape[0] < MIN_SERIES_LENGTH:
        raise DiagnosticsError(f"ESS needs a 1-D series of length >= {MIN_SERIES_LENGTH}, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise DiagnosticsError("series has non-finite values")
    if np.ptp(x) == 0.0:
        raise DiagnosticsError("series is constant (chain never moved)")


def ess(series) -> float:
    """
    n / tau with tau = -1 + 2 * sum of Geyer's initial monotone sequence of
    paired autocorrelations rho_{2k} + rho_{2k+1}.

    tau is floored at 1 / 1.05, so strongly anticorrelated chains report a
    finite ESS of at most 1.05 n.
    """
    x = np.asarray(series, dtype=float)
    _check_series(x)
    n = x.shape[0]
    rho = autocorrelation(x)

    n_pairs = n // 2
    pairs = rho[0:2 * n_pairs:2] + rho[1:2 * n_pairs:2]
    negative = np.nonzero(pairs < 0.0)[0]
    if negative.size:
        pairs = pairs[:negative[0]]
    pairs = np.minimum.accumulate(pairs)

    tau = -1.0 + 2.0 * float(np.sum(pairs))
    tau = max(tau, 1.0 / MAX_ESS_RATIO)
    return n / tau


@dataclass(frozen=True)
class EssReport:
    per_coordinate_ess: np.ndarray  # NaN where the coordinate is stuck
    min_ess: float
    median_ess: float
    n_used: int
    stuck_coordinates: List[int] = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return bool(self.stuck_coordinates)


def _post_burn_in(samples: np.ndarray, burn_in_fraction: float) -> np.ndarray:
    if not 0.0 <= burn_in_fraction < 1.0:
        raise DiagnosticsError(f"burn-in fraction must lie in [0, 1), got {burn_in_fraction}")
    start = int(np.floor(samples.shape[0] * burn_in_fraction))
    return samples[start:]


def ess_summary(trace: Trace, burn_in_fraction: float = 0.5) -> EssReport:
    if trace.n_iters == 0:
        raise DiagnosticsError("trace is empty")
    kept = _post_burn_in(trace.samples, burn_in_fraction)
    if kept.shape[0] < MIN_SERIES_LENGTH:
        raise DiagnosticsError(
            f"{kept.shape[0]} post-burn-in samples, need at least {MIN_SERIES_LENGTH}"
        )

    values = np.full(trace.dim, np.nan)
    stuck = []
    for i in range(trace.dim):
        column = kept[:, i]
        if np.ptp(column) == 0.0 or not np.all(np.isfinite(column)):
            stuck.append(i)
            continue
        values[i] = ess(column)

    moving = values[~np.isnan(values)]
    return EssReport(
        per_coordinate_ess=values,
        min_ess=float(np.min(moving)) if moving.size else float("nan"),
        median_ess=float(np.median(moving)) if moving.size else float("nan"),
        n_used=kept.shape[0],
        stuck_coordinates=stuck,
    )


def split_rhat_array(chains: np.ndarray) -> float:
    """Split R-hat for an (m, n) array: each chain is halved before comparing."""
    chains = np.asarray(chains, dtype=float)
    m, n = chains.shape
    half = n // 2
    if half < 2:
        raise DiagnosticsError(f"chains too short for split R-hat: length {n}")
    split = np.concatenate([chains[:, :half], chains[:, n - half:]], axis=0)

    within = float(np.mean(np.var(split, axis=1, ddof=1)))
    if within == 0.0:
        raise DiagnosticsError("zero within-chain variance")
    between = half * float(np.var(np.mean(split, axis=1), ddof=1))
    var_plus = (half - 1) / half * within + between / half
    return float(np.sqrt(var_plus / within))


def split_rhat(traces: Sequence[Trace], coordinate: int, burn_in_fraction: float = 0.0) -> float:
    if len(traces) < 2:
        raise DiagnosticsError(f"split R-hat needs at least 2 chains, got {len(traces)}")
    lengths = {t.n_iters for t in traces}
    if len(lengths) != 1:
        raise DiagnosticsError(f"chains have unequal lengths: {sorted(lengths)}")
    if lengths.pop() < MIN_SERIES_LENGTH:
        raise DiagnosticsError(f"chains must have length >= {MIN_SERIES_LENGTH}")
    chains = np.stack([_post_burn_in(t.samples, burn_in_fraction)[:, coordinate] for t in traces])
    return split_rhat_array(chains)


def acceptance_rate(trace: Trace) -> float:
    if trace.n_iters == 0:
        raise DiagnosticsError("trace is empty")
    return trace.acceptance_rate


@dataclass
class ScenarioSummary:
    """One summary.csv row plus the reasons behind an n/a status."""
    dataset_variant: str
    sampler: str
    precond_mode: str
    min_ess: float = float("nan")
    median_ess: float = float("nan")
    accept_rate: float = float("nan")
    rhat_max: float = float("nan")
    reasons: List[str] = field(default_factory=list)
    gradient_blowups: int = 0

    @property
    def status(self) -> str:
        return "ok" if not self.reasons else "n/a"

    def to_row(self) -> dict:
        row = {
            "dataset_variant": self.dataset_variant,
            "sampler": self.sampler,
            "precond_mode": self.precond_mode,
            "min_ess": self.min_ess,
            "median_ess": self.median_ess,
            "accept_rate": self.accept_rate,
            "rhat_max": self.rhat_max,
            "status": self.status,
        }
        return {key: row[key] for key in SUMMARY_COLUMNS}


def assess_scenario(
    traces: Sequence[Trace],
    burn_in_fraction: float = 0.5,
    rhat_threshold: float = RHAT_THRESHOLD,
    dataset_variant: str = "",
    sampler: str = "",
    precond_mode: str = "",
    failure: Optional[str] = None,
) -> ScenarioSummary:
    """
    Summarizes the chains of one scenario.

    The scenario is n/a when any chain has a stuck coordinate, split R-hat
    exceeds `rhat_threshold` on any coordinate, or `failure` is set (the run
    raised before producing traces). ESS is the per-coordinate mean over chains.
    """
    summary = ScenarioSummary(dataset_variant, sampler, precond_mode)
    if failure is not None:
        summary.reasons.append(failure)
        return summary
    if not traces:
        summary.reasons.append("no traces")
        return summary

    summary.accept_rate = float(np.mean([acceptance_rate(t) for t in traces]))
    summary.gradient_blowups = int(sum(t.gradient_blowups for t in traces))

    per_chain = []
    for c, trace in enumerate(traces):
        try:
            report = ess_summary(trace, burn_in_fraction)
        except DiagnosticsError as e:
            summary.reasons.append(f"chain {c}: {e}")
            continue
        if report.failed:
            summary.reasons.append(f"chain {c}: stuck coordinates {report.stuck_coordinates}")
        per_chain.append(report.per_coordinate_ess)

    if per_chain:
        stacked = np.vstack(per_chain)
        moving = ~np.all(np.isnan(stacked), axis=0)
        if np.any(moving):
            mean_ess = np.nanmean(stacked[:, moving], axis=0)
            summary.min_ess = float(np.min(mean_ess))
            summary.median_ess = float(np.median(mean_ess))

    kept = np.stack([_post_burn_in(t.samples, burn_in_fraction) for t in traces])
    rhats = {}
    for i in range(kept.shape[2]):
        try:
            rhats[i] = split_rhat_array(kept[:, :, i])
        except DiagnosticsError as e:
            summary.reasons.append(f"coordinate {i}: {e}")
    if rhats:
        worst = max(rhats, key=lambda i: rhats[i] if np.isfinite(rhats[i]) else np.inf)
        summary.rhat_max = float(rhats[worst])
        if not np.isfinite(summary.rhat_max) or summary.rhat_max > rhat_threshold:
            summary.reasons.append(
                f"split R-hat {summary.rhat_max:.3f} exceeds {rhat_threshold} (coordinate {worst})"
            )
    return summary
