"""
Datasets for the logistic-regression target.

Loading, covariate selection and standardization are pure transformations:
each returns a new Dataset and never touches its input.
"""

import json
import os
from dataclasses import dataclass, replace
from typing import List, Optional, Set

import numpy as np
import pandas as pd
from scipy.special import expit

from app.core.logger import get_logger

logger = get_logger("DataLoader")

DEFAULT_MISSING_MARKERS = {"?", ""}


class DataError(ValueError):
    """Raised for unreadable or unusable datasets."""


@dataclass(frozen=True)
class ColumnScaling:
    column: str
    mean: float
    scale: float


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    column_names: List[str]
    scaling: Optional[List[ColumnScaling]] = None
    dropped_rows: int = 0

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def columns(self, indices: List[int]) -> "Dataset":
        scaling = None if self.scaling is None else [self.scaling[i] for i in indices]
        return replace(
            self,
            features=self.features[:, indices],
            column_names=[self.column_names[i] for i in indices],
            scaling=scaling,
        )


def _resolve_label_column(df: pd.DataFrame, label_column: str) -> str:
    if label_column in df.columns:
        return label_column
    try:
        index = int(label_column)
    except ValueError:
        raise DataError(f"label column '{label_column}' not found")
    if not -len(df.columns) <= index < len(df.columns):
        raise DataError(f"label column index {index} out of range for {len(df.columns)} columns")
    return df.columns[index]


def _as_number(value: str) -> Optional[float]:
    try:
        return float(value)
    except ValueError:
        return None


def _binarize(values: pd.Series, positive_class: Optional[str]) -> np.ndarray:
    distinct = sorted(values.unique())
    if positive_class is None:
        numeric = {_as_number(v) for v in distinct}
        if None in numeric or not numeric <= {0.0, 1.0}:
            raise DataError(
                f"label column has values {distinct[:10]}; set positive_class to binarize it"
            )
        return values.astype(float).to_numpy()

    target = _as_number(positive_class)
    if target is not None and all(_as_number(v) is not None for v in distinct):
        hits = values.astype(float).to_numpy() == target
    else:
        hits = (values == positive_class).to_numpy()
    if not hits.any():
        raise DataError(f"positive class '{positive_class}' does not occur in the label column")
    if len(distinct) > 2:
        logger.warning(f"Label column has {len(distinct)} classes; using '{positive_class}' against the rest")
    return hits.astype(float)


def load_csv(
    path: str,
    label_column: str = "-1",
    missing_markers: Optional[Set[str]] = None,
    header: bool = True,
    positive_class: Optional[str] = None,
) -> Dataset:
    """
    Reads a comma-separated file; rows containing any missing marker are dropped.

    `label_column` is a column name or an integer index (negative counts from
    the end). Line numbers in error messages refer to the file.
    """
    if not os.path.exists(path):
        raise DataError(f"dataset not found: {path}")
    markers = DEFAULT_MISSING_MARKERS if missing_markers is None else set(missing_markers)

    try:
        df = pd.read_csv(path, header=0 if header else None, dtype=str, keep_default_na=False)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DataError(f"could not parse {path}: {e}")
    df.columns = [str(c).strip() for c in df.columns]
    df = df.apply(lambda col: col.str.strip())

    label = _resolve_label_column(df, label_column)

    missing = df.isin(markers).any(axis=1)
    dropped = int(missing.sum())
    if dropped:
        logger.warning(f"Dropped {dropped} rows with missing values from {path}")
    df = df[~missing]
    if df.empty:
        raise DataError(f"no complete rows in {path}")

    line_offset = 2 if header else 1
    feature_names = [c for c in df.columns if c != label]
    features = np.empty((len(df), len(feature_names)))
    for j, name in enumerate(feature_names):
        parsed = pd.to_numeric(df[name], errors="coerce")
        bad = parsed.isna() | ~np.isfinite(parsed.to_numpy(dtype=float))
        if bad.any():
            row = bad.idxmax()
            raise DataError(
                f"unparseable value '{df.at[row, name]}' at line {row + line_offset}, column '{name}'"
            )
        features[:, j] = parsed.to_numpy(dtype=float)

    labels = _binarize(df[label], positive_class)
    logger.info(f"Loaded {features.shape[0]} rows x {features.shape[1]} covariates from {path}")
    return Dataset(
        features=features,
        labels=labels,
        column_names=feature_names,
        dropped_rows=dropped,
    )


def select_covariates(
    ds: Dataset,
    n_imbalanced: int,
    n_regular: int,
    rarity_threshold: int = 2,
    categorical_max_levels: int = 10,
) -> Dataset:
    """
    Keeps the first `n_imbalanced` imbalanced columns followed by the first
    `n_regular` other non-constant columns, in file order.

    A column is imbalanced when it has at most `categorical_max_levels`
    distinct values and its rarest value occurs at most `rarity_threshold` times.
    """
    imbalanced, regular = [], []
    for j in range(ds.d):
        _, counts = np.unique(ds.features[:, j], return_counts=True)
        if counts.size < 2:
            continue
        if counts.size <= categorical_max_levels and counts.min() <= rarity_threshold:
            imbalanced.append(j)
        else:
            regular.append(j)

    if len(imbalanced) < n_imbalanced:
        raise DataError(
            f"only {len(imbalanced)} imbalanced columns qualify, {n_imbalanced} requested"
        )
    if len(regular) < n_regular:
        raise DataError(f"only {len(regular)} regular columns available, {n_regular} requested")

    chosen = imbalanced[:n_imbalanced] + regular[:n_regular]
    logger.info(f"Selected {n_imbalanced} imbalanced and {n_regular} regular covariates")
    return ds.columns(chosen)


def standardize(ds: Dataset) -> Dataset:
    """Zero mean, unit (population) variance per column."""
    mean = ds.features.mean(axis=0)
    scale = ds.features.std(axis=0)
    zero = np.nonzero(scale == 0.0)[0]
    if zero.size:
        raise DataError(f"column '{ds.column_names[zero[0]]}' has zero variance")
    scaling = [ColumnScaling(name, float(m), float(s)) for name, m, s in zip(ds.column_names, mean, scale)]
    return replace(ds, features=(ds.features - mean) / scale, scaling=scaling)


def inverse_transform(ds: Dataset) -> np.ndarray:
    if ds.scaling is None:
        raise DataError("dataset carries no standardization record")
    mean = np.array([s.mean for s in ds.scaling])
    scale = np.array([s.scale for s in ds.scaling])
    return ds.features * scale + mean


def design_matrix(ds: Dataset, include_intercept: bool = True) -> np.ndarray:
    if not include_intercept:
        return ds.features
    return np.hstack([np.ones((ds.n, 1)), ds.features])


def synthesize_imbalanced(
    n: int = 452,
    d_imbalanced: int = 25,
    d_regular: int = 25,
    rare_count: int = 2,
    true_beta_scale: float = 1.0,
    seed: int = 0,
) -> Dataset:
    """
    Binary columns with exactly `rare_count` ones each, then continuous columns
    with scales log-uniform on [0.05, 32]. Labels follow a logistic model with
    coefficients drawn on the raw scale, so the widest columns dominate the
    linear predictor and the raw-coordinate posterior is badly scaled.
    """
    if rare_count < 1 or rare_count > n / 10:
        raise DataError(f"rare_count must lie in [1, n/10], got {rare_count} for n = {n}")
    rng = np.random.default_rng(seed)

    rare = np.zeros((n, d_imbalanced))
    for j in range(d_imbalanced):
        rare[rng.choice(n, size=rare_count, replace=False), j] = 1.0

    scales = np.exp(rng.uniform(np.log(0.05), np.log(32.0), size=d_regular))
    continuous = rng.normal(size=(n, d_regular)) * scales

    beta_rare = true_beta_scale * rng.normal(size=d_imbalanced)
    beta_continuous = true_beta_scale * rng.normal(size=d_regular) / np.sqrt(max(d_regular, 1))
    features = np.hstack([rare, continuous])
    labels = (rng.random(n) < expit(features @ np.concatenate([beta_rare, beta_continuous]))).astype(float)

    names = [f"imb_{j}" for j in range(d_imbalanced)] + [f"reg_{j}" for j in range(d_regular)]
    return Dataset(features=features, labels=labels, column_names=names)


def save_dataset(ds: Dataset, path: str):
    """Writes features and labels as CSV and the scaling records to `<path>.scaling.json`."""
    df = pd.DataFrame(ds.features, columns=ds.column_names)
    df["label"] = ds.labels.astype(int)
    df.to_csv(path, index=False)
    records = [] if ds.scaling is None else [
        {"column": s.column, "mean": s.mean, "scale": s.scale} for s in ds.scaling
    ]
    with open(path + ".scaling.json", "w") as f:
        json.dump(records, f, indent=2)
