"""Experiment defaults loaded from YAML."""

from pathlib import Path

import yaml
from pydantic import BaseModel, ConfigDict, Field

from ticket.config.settings import get_settings


class ReportedValues(BaseModel):
    """Published per-weight sample counts the repro command compares against."""

    thm1_unit: float = 630.0
    thm1_worst: float = 2450.0
    recycle_unit: float = 144.0
    recycle_worst: float = 574.0
    malach: float = 2e15


class ReproConfig(BaseModel):
    """The headline setting: uniform widths n_max over depth layers."""

    model_config = ConfigDict(extra="forbid")

    n_max: int = Field(default=100, ge=1)
    depth: int = Field(default=10, ge=1)
    eps: float = Field(default=0.01, gt=0)
    delta: float = Field(default=0.01, gt=0, lt=1)
    w_max: float = Field(default=1.0, gt=0)
    f_max: float = Field(default=1.0, gt=0)
    tolerance: float = Field(default=0.02, ge=0, lt=1)
    reported: ReportedValues = Field(default_factory=ReportedValues)


class SubsumDefaults(BaseModel):
    """Sub-sum gap analysis defaults."""

    model_config = ConfigDict(extra="forbid")

    subsum_count: int = Field(default=15, ge=1, le=24)
    uniform_count: int = Field(default=1000, ge=2)
    w_max: float = Field(default=1.0, gt=0)


class EndToEndDefaults(BaseModel):
    """Defaults of the end-to-end run."""

    model_config = ConfigDict(extra="forbid")

    eps: float = Field(default=0.2, gt=0)
    delta: float = Field(default=0.1, gt=0, lt=1)
    w_max: float = Field(default=1.0, gt=0)
    num_inputs: int = Field(default=1000, ge=1)


class ExperimentsConfig(BaseModel):
    """Root of the experiments file."""

    repro: ReproConfig = Field(default_factory=ReproConfig)
    subsums: SubsumDefaults = Field(default_factory=SubsumDefaults)
    end_to_end: EndToEndDefaults = Field(default_factory=EndToEndDefaults)


class ConfigLoadError(Exception):
    """The experiments file is missing, unreadable or invalid."""


def load_experiments_config(config_path: str | Path | None = None) -> ExperimentsConfig:
    """Parse the experiments YAML into an ExperimentsConfig.

    Sections left out of the file keep their model defaults.

    Args:
        config_path: File to read; TICKET_CONFIG_PATH when omitted.

    Raises:
        ConfigLoadError: If the file is not found, is not valid YAML, is empty
            or fails validation.
    """
    path = Path(config_path if config_path is not None else get_settings().config_path)
    if not path.is_file():
        raise ConfigLoadError(f"Experiments file not found: {path}")

    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as e:
        raise ConfigLoadError(f"Invalid YAML in {path}: {e}") from e
    except OSError as e:
        raise ConfigLoadError(f"Cannot read {path}: {e}") from e

    if raw is None:
        raise ConfigLoadError(f"Empty experiments file: {path}")
    try:
        return ExperimentsConfig.model_validate(raw)
    except ValueError as e:
        raise ConfigLoadError(f"{path}: experiments validation failed: {e}") from e
