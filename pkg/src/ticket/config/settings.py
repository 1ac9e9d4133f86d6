"""Environment settings of the toolkit (TICKET_* variables or a .env file)."""

from enum import Enum
from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class LogLevel(str, Enum):
    """Accepted values of TICKET_LOG_LEVEL and TICKET_AUDIT_LOG_LEVEL."""

    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"


class Settings(BaseSettings):
    """Run-wide defaults that do not belong in the experiments file."""

    model_config = SettingsConfigDict(
        env_prefix="TICKET_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    log_level: LogLevel = LogLevel.INFO
    config_path: str = "config/experiments.yaml"
    output_dir: str = "out"
    default_seed: int = Field(default=0, ge=0)
    # Power-iteration stopping tolerance for spectral norms.
    spectral_tol: float = Field(default=1e-9, gt=0)

    audit_enabled: bool = True
    audit_log_level: LogLevel = LogLevel.INFO


@lru_cache
def get_settings() -> Settings:
    """Settings read once per process; tests clear the cache."""
    return Settings()
