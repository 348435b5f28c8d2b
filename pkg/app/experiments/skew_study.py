from typing import Sequence

import numpy as np
import pandas as pd

from app.core.config import ConfigError
from app.core.logger import get_logger
from app.core.preconditioner import Preconditioner
from app.core.targets import SkewNormalTarget
from app.core.trace_store import TraceStore
from app.samplers.base import ChainState
from app.samplers.runner import make_sampler

logger = get_logger("SkewStudy")

DEFAULT_ETAS = (0.0, 1.0, 10.0, 100.0, 1000.0)


def skew_acceptance_table(
    etas: Sequence[float] = DEFAULT_ETAS,
    x: float = 1.5,
    y: float = 0.0,
    step_size: float = 1.0,
) -> pd.DataFrame:
    """
    Acceptance probability of the move x -> y for MALA and Barker on the
    skew-normal family, one row per eta in ascending order.
    """
    precond = Preconditioner.identity(1, global_scale=step_size)
    rows = []
    for eta in sorted(etas):
        target = SkewNormalTarget(eta)
        mode = target.mode()
        if x <= mode:
            raise ConfigError(f"x = {x} must lie above the mode {mode:.4f} of the eta = {eta} target")
        row = {"eta": eta}
        for kind in ("mala", "barker"):
            sampler = make_sampler(kind, target)
            log_alpha = sampler.log_accept(
                ChainState.from_target(target, [x]), ChainState.from_target(target, [y]), precond
            )
            row[f"log_alpha_{kind}"] = log_alpha
            row[f"alpha_{kind}"] = float(np.exp(log_alpha))
        rows.append(row)
    return pd.DataFrame(rows, columns=["eta", "alpha_mala", "alpha_barker", "log_alpha_mala", "log_alpha_barker"])


def cmd_skewstudy(
    out_dir: str,
    etas: Sequence[float] = DEFAULT_ETAS,
    x: float = 1.5,
    y: float = 0.0,
    step_size: float = 1.0,
) -> int:
    store = TraceStore(out_dir)
    store.clear_failure()
    store.save_params({
        "etas": ",".join(str(e) for e in sorted(etas)),
        "x": x,
        "y": y,
        "step_size": step_size,
    })
    try:
        table = skew_acceptance_table(etas, x, y, step_size)
        store.save_table(table, "skew_study.csv")
    except Exception as e:
        store.mark_failed(f"{type(e).__name__}: {e}")
        raise
    print(table.to_string(index=False))
    logger.info(f"Wrote {store.path('skew_study.csv')}")
    return 0
