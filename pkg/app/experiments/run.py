import pandas as pd

from app.core.config import ExperimentConfig
from app.core.diagnostics import assess_scenario
from app.core.logger import get_logger
from app.core.trace_store import TraceStore
from app.experiments.targets_factory import build_target, chain_preconditioner, dataset_variant
from app.samplers.runner import run_chain, run_chains

logger = get_logger("RunCommand")


def cmd_run(config: ExperimentConfig) -> int:
    """Runs `config.chains` chains and writes traces, adaptation history, summary and snapshot."""
    logger.info("Step 1/3 - Building target...")
    target = build_target(config)

    store = TraceStore(config.output_dir)
    store.clear_failure()
    store.save_config(config)

    try:
        logger.info(f"Step 2/3 - Running {config.chains} {config.sampler} chain(s) of {config.iters} iterations...")
        precond = chain_preconditioner(config, target.dim)
        if config.chains == 1:
            traces = [run_chain(target, config.sampler, config.iters, precond=precond, seed=config.seed)]
        else:
            traces = run_chains(target, config.sampler, config.iters, config.chains, precond=precond, seed=config.seed)

        logger.info("Step 3/3 - Writing outputs...")
        for c, trace in enumerate(traces):
            store.save_trace(trace, "trace" if c == 0 else f"trace_chain{c}")
        summary = assess_scenario(
            traces,
            config.burn_in_frac,
            dataset_variant=dataset_variant(config),
            sampler=config.sampler,
            precond_mode=config.precond,
        )
        store.save_summary([summary.to_row()])
    except Exception as e:
        store.mark_failed(f"{type(e).__name__}: {e}")
        raise

    print(pd.DataFrame([summary.to_row()]).to_string(index=False))
    for reason in summary.reasons:
        print(f"  n/a: {reason}")
    logger.info(f"Outputs written to {store.out_dir}")
    return 0
