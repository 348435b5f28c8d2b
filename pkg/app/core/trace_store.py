"""
Trace store: file-based persistence for chain output.

Stores, per output directory:
- Samples and acceptance flags as CSV
- Adaptation history as a sidecar CSV
- Summary tables and the config snapshot
"""

import os
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from app.core.config import ExperimentConfig


@dataclass(frozen=True)
class AdaptHistory:
    """Per-iteration snapshots of the global scale and diag(Sigma)."""
    global_scales: np.ndarray
    covariance_diagonals: np.ndarray


@dataclass(frozen=True)
class Trace:
    """Output of one chain. Immutable once returned."""
    samples: np.ndarray
    accept_flags: np.ndarray
    seed: Optional[int]
    sampler_label: str
    accept_probs: Optional[np.ndarray] = None
    adapt_history: Optional[AdaptHistory] = None
    gradient_blowups: int = 0

    @property
    def n_iters(self) -> int:
        return self.samples.shape[0]

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    @property
    def acceptance_rate(self) -> float:
        return float(np.mean(self.accept_flags))


SUMMARY_COLUMNS = [
    "dataset_variant",
    "sampler",
    "precond_mode",
    "min_ess",
    "median_ess",
    "accept_rate",
    "rhat_max",
    "status",
]


class TraceStore:
    """
    Owns one output directory.

    Every write goes through pandas with no index column and no timestamps, so
    identical runs produce byte-identical files.
    """

    def __init__(self, out_dir: str):
        self.out_dir = out_dir
        os.makedirs(self.out_dir, exist_ok=True)
        self.summary_file = os.path.join(self.out_dir, "summary.csv")
        self.config_file = os.path.join(self.out_dir, "config.env")
        self.error_file = os.path.join(self.out_dir, "error.txt")

    def path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    def save_trace(self, trace: Trace, stem: str = "trace"):
        """Writes `<stem>.csv` and, when adaptation ran, the adaptation sidecar."""
        columns = [f"x{i}" for i in range(trace.dim)]
        df = pd.DataFrame(trace.samples, columns=columns)
        df["accepted"] = trace.accept_flags.astype(int)
        df.to_csv(self.path(f"{stem}.csv"), index=False)

        if trace.adapt_history is not None:
            history = trace.adapt_history
            adapt_df = pd.DataFrame(
                history.covariance_diagonals,
                columns=[f"sigma_{i}" for i in range(trace.dim)],
            )
            adapt_df.insert(0, "global_scale", history.global_scales)
            adapt_df.insert(0, "iteration", np.arange(1, trace.n_iters + 1))
            adapt_name = "adaptation.csv" if stem == "trace" else f"{stem}_adaptation.csv"
            adapt_df.to_csv(self.path(adapt_name), index=False)

    def load_trace(self, stem: str = "trace", seed: Optional[int] = None, sampler_label: str = "") -> Trace:
        df = pd.read_csv(self.path(f"{stem}.csv"))
        accept_flags = df.pop("accepted").to_numpy().astype(bool)
        return Trace(
            samples=df.to_numpy(dtype=float),
            accept_flags=accept_flags,
            seed=seed,
            sampler_label=sampler_label,
        )

    def save_summary(self, rows: List[dict]):
        pd.DataFrame(rows, columns=SUMMARY_COLUMNS).to_csv(self.summary_file, index=False)

    def load_summary(self) -> pd.DataFrame:
        """Reads summary.csv back; the status token "n/a" stays a string, empty cells become NaN."""
        return pd.read_csv(self.summary_file, keep_default_na=False, na_values=[""])

    def save_table(self, df: pd.DataFrame, name: str):
        df.to_csv(self.path(name), index=False)

    def save_config(self, config: ExperimentConfig):
        config.write_snapshot(self.config_file)

    def save_params(self, params: Dict[str, object]):
        """Snapshot for commands driven by plain parameters rather than an ExperimentConfig."""
        lines = [f"{key}={value}" for key, value in sorted(params.items())]
        with open(self.config_file, "w") as f:
            f.write("\n".join(lines) + "\n")

    def mark_failed(self, message: str):
        """Flags partial outputs left behind by a failed run."""
        with open(self.error_file, "w") as f:
            f.write(message + "\n")

    def clear_failure(self):
        if os.path.exists(self.error_file):
            os.remove(self.error_file)
