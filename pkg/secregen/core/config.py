"""Runtime configuration with a small, readable structure."""

import os
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .paths import CONFIG_PATH
from .persistence import json_load_safe

ORACLE_BUDGET_ENV = "RGC_ORACLE_BUDGET"
CONFIG_PATH_ENV = "RGC_CONFIG"

DEFAULT_FIELD = "2^16"
DEFAULT_ORACLE_BUDGET = 10_000_000


class OracleConfig(BaseModel):
    """Exhaustive entropy oracle settings."""

    model_config = ConfigDict(extra="ignore")

    budget: int = Field(
        default=DEFAULT_ORACLE_BUDGET, ge=1, description="Maximum number of joint (M, K) inputs to enumerate"
    )


class SweepConfig(BaseModel):
    """Eavesdropper-subset sweep settings."""

    model_config = ConfigDict(extra="ignore")

    workers: int = Field(default=1, ge=1, description="Process-pool size (1 = sweep in-process)")


class LoggingConfig(BaseModel):
    """Log level and optional rotating log file."""

    model_config = ConfigDict(extra="ignore")

    level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = Field(
        default="WARNING", description="Root log level, case-insensitive"
    )
    log_dir: str | None = Field(default=None, description="Directory for secregen.log (None = stderr only)")

    @field_validator("level", mode="before")
    @classmethod
    def _upper_level(cls, value: object) -> object:
        return value.upper() if isinstance(value, str) else value


class SecregenConfig(BaseModel):
    """Main configuration combining all sections."""

    model_config = ConfigDict(extra="ignore")

    field: str = Field(default=DEFAULT_FIELD, description="Default finite field, '2^m' or a prime order")
    oracle: OracleConfig = Field(default_factory=OracleConfig, description="Entropy oracle settings")
    sweep: SweepConfig = Field(default_factory=SweepConfig, description="Secrecy sweep settings")
    logging: LoggingConfig = Field(default_factory=LoggingConfig, description="Logging settings")

    @model_validator(mode="after")
    def _apply_env(self) -> "SecregenConfig":
        """Environment overrides win over file values."""
        raw = os.environ.get(ORACLE_BUDGET_ENV)
        if raw:
            budget = int(raw)
            if budget < 1:
                raise ValueError(f"{ORACLE_BUDGET_ENV} must be positive, got {raw}")
            self.oracle.budget = budget
        return self

    @classmethod
    def load(cls, path: Path | None = None) -> "SecregenConfig":
        if path is None:
            path = Path(os.environ.get(CONFIG_PATH_ENV, CONFIG_PATH))
        data = json_load_safe(path)
        if data is not None:
            return cls.model_validate(data)
        return cls()


# Global instance
_config: SecregenConfig | None = None


def get_config() -> SecregenConfig:
    """Get current config."""
    global _config
    if _config is None:
        _config = SecregenConfig.load()
    return _config


def reset_config() -> None:
    """Drop the cached config so the next get_config() reloads it."""
    global _config
    _config = None
