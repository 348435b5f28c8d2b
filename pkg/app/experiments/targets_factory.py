import os
from typing import Optional

import numpy as np

from app.core import data
from app.core.config import ConfigError, ExperimentConfig
from app.core.preconditioner import Preconditioner
from app.core.targets import TargetDensity, make_gaussian, make_logistic_posterior, make_skew_normal
from app.samplers.runner import AdaptationSettings


def load_dataset(config: ExperimentConfig, standardized: Optional[bool] = None) -> data.Dataset:
    """Synthetic or file-backed dataset after selection and (optionally) standardization."""
    standardized = config.standardize if standardized is None else standardized
    if config.synthetic:
        ds = data.synthesize_imbalanced(
            n=config.synthetic_n,
            d_imbalanced=config.n_imbalanced,
            d_regular=config.n_regular,
            rare_count=config.synthetic_rare_count,
            true_beta_scale=config.synthetic_beta_scale,
            seed=config.seed,
        )
    else:
        if not config.dataset or not os.path.exists(config.dataset):
            raise ConfigError(f"dataset not found: {config.dataset}")
        ds = data.load_csv(
            config.dataset,
            label_column=config.label_column,
            missing_markers=config.marker_set,
            header=config.header,
            positive_class=config.positive_class,
        )
        if config.select_covariates:
            ds = data.select_covariates(
                ds,
                config.n_imbalanced,
                config.n_regular,
                rarity_threshold=config.rarity_threshold,
                categorical_max_levels=config.categorical_max_levels,
            )
    return data.standardize(ds) if standardized else ds


def build_target(config: ExperimentConfig, standardized: Optional[bool] = None) -> TargetDensity:
    if config.target == "gaussian":
        return make_gaussian(config.dim)
    if config.target == "skew-normal":
        return make_skew_normal(config.eta)
    ds = load_dataset(config, standardized)
    X = data.design_matrix(ds, include_intercept=config.include_intercept)
    return make_logistic_posterior(X, ds.labels, config.prior_variance)


def dataset_variant(config: ExperimentConfig, standardized: Optional[bool] = None) -> str:
    if config.target != "logistic":
        return config.target
    standardized = config.standardize if standardized is None else standardized
    return "standardized" if standardized else "raw"


def chain_preconditioner(config: ExperimentConfig, dim: int):
    """AdaptationSettings when adapting, else a fixed lambda^2 I."""
    diagonal = config.precond == "diag"
    if config.adapt:
        return AdaptationSettings(
            diagonal=diagonal,
            target_accept=config.target_accept,
            learning_exponent=config.learning_exponent,
            use_indicator=config.use_indicator,
            covariance_offset=config.covariance_offset,
            global_scale=config.global_scale,
            covariance_exponent=config.covariance_exponent,
            dense_warmup=config.dense_warmup,
        )
    scale = config.global_scale or 2.38 / np.sqrt(dim)
    return Preconditioner.identity(dim, global_scale=scale, diagonal=diagonal)
