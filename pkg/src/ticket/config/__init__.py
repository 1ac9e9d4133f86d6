"""Configuration module for the toolkit."""

from ticket.config.experiments import (
    ConfigLoadError,
    EndToEndDefaults,
    ExperimentsConfig,
    ReportedValues,
    ReproConfig,
    SubsumDefaults,
    load_experiments_config,
)
from ticket.config.settings import LogLevel, Settings, get_settings

__all__ = [
    "ConfigLoadError",
    "EndToEndDefaults",
    "ExperimentsConfig",
    "LogLevel",
    "ReportedValues",
    "ReproConfig",
    "Settings",
    "SubsumDefaults",
    "get_settings",
    "load_experiments_config",
]
