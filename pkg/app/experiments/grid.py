"""
Four-scenario logistic-regression grid.

Cells are {raw, standardized} x {dense, diag} x {mala, barker}. Each cell runs
its chains from SeedSequence([seed, cell_index]) and writes its own files, so
the result does not depend on how many worker processes are used.
"""

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from app.core.config import ConfigError, ExperimentConfig, settings
from app.core.diagnostics import ScenarioSummary, assess_scenario
from app.core.logger import get_logger
from app.core.trace_store import TraceStore
from app.experiments.targets_factory import build_target, chain_preconditioner, load_dataset
from app.samplers.runner import run_chains

logger = get_logger("GridCommand")

VARIANTS = ("raw", "standardized")
PRECOND_MODES = ("dense", "diag")
GRID_SAMPLERS = ("mala", "barker")


@dataclass(frozen=True)
class Cell:
    index: int
    variant: str
    precond: str
    sampler: str

    @property
    def label(self) -> str:
        return f"{self.variant}_{self.precond}_{self.sampler}"


def grid_cells() -> List[Cell]:
    return [
        Cell(i, variant, precond, sampler)
        for i, (variant, precond, sampler) in enumerate(itertools.product(VARIANTS, PRECOND_MODES, GRID_SAMPLERS))
    ]


def run_cell(config: ExperimentConfig, cell: Cell, n_chains: int) -> ScenarioSummary:
    """Runs one cell; any exception becomes an n/a row."""
    cell_config = config.model_copy(update={
        "standardize": cell.variant == "standardized",
        "precond": cell.precond,
        "sampler": cell.sampler,
    })
    try:
        target = build_target(cell_config)
        traces = run_chains(
            target,
            cell.sampler,
            cell_config.iters,
            n_chains,
            precond=chain_preconditioner(cell_config, target.dim),
            seed=np.random.SeedSequence([config.seed, cell.index]),
        )
    except Exception as e:
        logger.warning(f"Cell {cell.label} failed: {e}")
        return assess_scenario(
            [], dataset_variant=cell.variant, sampler=cell.sampler, precond_mode=cell.precond,
            failure=f"{type(e).__name__}: {e}",
        )

    store = TraceStore(os.path.join(config.output_dir, "cells", cell.label))
    store.save_trace(traces[0])
    summary = assess_scenario(
        traces,
        config.burn_in_frac,
        dataset_variant=cell.variant,
        sampler=cell.sampler,
        precond_mode=cell.precond,
    )
    logger.info(f"Cell {cell.label}: status {summary.status}, min ESS {summary.min_ess:.1f}")
    return summary


def _run_indexed(args: Tuple[ExperimentConfig, Cell, int]) -> ScenarioSummary:
    return run_cell(*args)


def cmd_grid(config: ExperimentConfig, workers: Optional[int] = None) -> int:
    """Runs all eight cells and writes summary.csv; failed cells are rows with status n/a."""
    if not config.dataset and not config.synthetic:
        raise ConfigError("grid needs a dataset path or synthetic=true")
    config = config.model_copy(update={"target": "logistic"})
    n_chains = config.chains if "chains" in config.model_fields_set else settings.GRID_CHAINS
    workers = workers or settings.GRID_WORKERS

    logger.info("Step 1/3 - Resolving dataset...")
    load_dataset(config, standardized=False)

    store = TraceStore(config.output_dir)
    store.clear_failure()
    store.save_config(config.model_copy(update={"chains": n_chains}))

    cells = grid_cells()
    logger.info(f"Step 2/3 - Running {len(cells)} cells x {n_chains} chains on {workers} worker(s)...")
    jobs = [(config, cell, n_chains) for cell in cells]
    try:
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                summaries = list(pool.map(_run_indexed, jobs))
        else:
            summaries = [_run_indexed(job) for job in jobs]

        logger.info("Step 3/3 - Writing summary...")
        rows = [s.to_row() for s in summaries]
        store.save_summary(rows)
    except Exception as e:
        store.mark_failed(f"{type(e).__name__}: {e}")
        raise

    print(pd.DataFrame(rows).to_string(index=False))
    for cell, summary in zip(cells, summaries):
        for reason in summary.reasons:
            print(f"  {cell.label} n/a: {reason}")
    return 0
