import os
from typing import Any, Dict, Literal, Optional

from dotenv import dotenv_values
from pydantic import BaseModel, Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class ConfigError(ValueError):
    """Raised for invalid or unresolvable experiment configuration."""


class Settings(BaseSettings):
    LOG_LEVEL: str = "INFO"
    OUTPUT_DIR: str = "runs"
    SHOW_PROGRESS: bool = False
    GRID_ITERATIONS: int = 30000
    GRID_CHAINS: int = 4
    GRID_WORKERS: int = 1
    JUMP_PATHS: int = 2000

    model_config = SettingsConfigDict(env_file=".env", extra="ignore")


settings = Settings()


TargetKind = Literal["gaussian", "skew-normal", "logistic"]
SamplerKind = Literal["rwm", "mala", "barker", "barker-global"]
PrecondMode = Literal["dense", "diag"]


class ExperimentConfig(BaseModel):
    """
    Flat, fully serializable description of one experiment.

    Every field maps to one `key=value` line of a config file and to one
    command-line flag, so a snapshot written beside the outputs is enough to
    reproduce the run.
    """

    # Target
    target: TargetKind = "gaussian"
    dim: int = Field(default=10, ge=1)
    eta: float = Field(default=0.0, ge=0.0)
    prior_variance: float = Field(default=25.0, gt=0.0)

    # Logistic-regression data
    dataset: Optional[str] = None
    synthetic: bool = False
    header: bool = True
    label_column: str = "-1"
    positive_class: Optional[str] = None
    missing_markers: str = "?,"
    select_covariates: bool = True
    n_imbalanced: int = Field(default=25, ge=0)
    n_regular: int = Field(default=25, ge=0)
    rarity_threshold: int = Field(default=2, ge=1)
    categorical_max_levels: int = Field(default=10, ge=2)
    standardize: bool = False
    include_intercept: bool = True
    synthetic_n: int = Field(default=452, ge=1)
    synthetic_rare_count: int = Field(default=2, ge=1)
    synthetic_beta_scale: float = Field(default=1.0, gt=0.0)

    # Sampler
    sampler: SamplerKind = "barker"
    iters: int = Field(default=30000, ge=1)
    seed: int = Field(default=0, ge=0)
    chains: int = Field(default=1, ge=1)

    # Adaptation
    adapt: bool = True
    precond: PrecondMode = "diag"
    target_accept: Optional[float] = None
    learning_exponent: float = Field(default=0.6, gt=0.5, le=1.0)
    use_indicator: bool = False
    covariance_offset: int = Field(default=100, ge=0)
    covariance_exponent: float = Field(default=0.85, gt=0.5, le=1.0)
    dense_warmup: int = Field(default=5000, ge=0)
    global_scale: Optional[float] = None

    # Reporting
    burn_in_frac: float = Field(default=0.5, ge=0.0, lt=1.0)
    out: Optional[str] = None

    @field_validator("target_accept")
    @classmethod
    def _check_target_accept(cls, value: Optional[float]) -> Optional[float]:
        if value is not None and not 0.0 < value < 1.0:
            raise ValueError("target_accept must lie in (0, 1)")
        return value

    @field_validator("global_scale")
    @classmethod
    def _check_global_scale(cls, value: Optional[float]) -> Optional[float]:
        if value is not None and value <= 0.0:
            raise ValueError("global_scale must be positive")
        return value

    @model_validator(mode="after")
    def _check_dataset_source(self) -> "ExperimentConfig":
        if self.target == "logistic" and not self.dataset and not self.synthetic:
            raise ValueError("logistic target needs a dataset path or synthetic=true")
        return self

    @property
    def marker_set(self) -> set:
        return {marker.strip() for marker in self.missing_markers.split(",")}

    @property
    def output_dir(self) -> str:
        return self.out or os.path.join(settings.OUTPUT_DIR, "latest")

    @classmethod
    def from_sources(
        cls,
        config_file: Optional[str] = None,
        overrides: Optional[Dict[str, Any]] = None,
    ) -> "ExperimentConfig":
        """Merge defaults, an optional key=value file and CLI overrides (highest wins)."""
        values: Dict[str, Any] = {}
        if config_file:
            values.update(read_flat_file(config_file))
        for key, value in (overrides or {}).items():
            if value is not None:
                values[key] = value
        return cls(**values)

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        return cls(**read_flat_file(path))

    def to_flat_dict(self) -> Dict[str, str]:
        flat = {}
        for key, value in self.model_dump().items():
            if value is None:
                flat[key] = ""
            elif isinstance(value, bool):
                flat[key] = "true" if value else "false"
            else:
                flat[key] = str(value)
        return flat

    def write_snapshot(self, path: str):
        """Write sorted key=value lines; `from_file` reads them back."""
        lines = [f"{key}={value}" for key, value in sorted(self.to_flat_dict().items())]
        with open(path, "w") as f:
            f.write("\n".join(lines) + "\n")


def read_flat_file(path: str) -> Dict[str, str]:
    """Parse a flat key=value file; empty values are treated as unset."""
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    raw = dotenv_values(path)
    unknown = set(raw) - set(ExperimentConfig.model_fields)
    if unknown:
        raise ConfigError(f"unknown config keys in {path}: {', '.join(sorted(unknown))}")
    return {key: value for key, value in raw.items() if value not in (None, "")}
