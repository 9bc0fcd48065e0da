"""Application configuration using pydantic-settings."""

import os
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Any, Literal

from dotenv import dotenv_values
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

OutputFormat = Literal["jsonl", "csv", "pretty"]


class Settings(BaseSettings):
    """Settings loaded from THUE_FAMILY_* environment variables and .env."""

    model_config = SettingsConfigDict(
        env_prefix="THUE_FAMILY_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Precision (bits)
    prec: int = Field(128, ge=32)
    precision_cap_bits: int = Field(100_000, ge=64)

    # Parallelism
    threads: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1)

    # Logging
    log_level: str = "INFO"

    # Coefficient memo (number of cached (n, a) entries)
    memo_limit: int = Field(1_000_000, ge=0)

    # Small-value witnesses
    epsilon: str = "1/8"

    # Unit decomposition
    neighbor_radius: int = Field(2, ge=0)

    # Output
    out: Path | None = None
    format: OutputFormat = "jsonl"
    checkpoint: Path | None = None

    @field_validator("epsilon")
    @classmethod
    def _check_epsilon(cls, value: str) -> str:
        eps = Fraction(value)
        if not 0 < eps < 3:
            raise ValueError("epsilon must lie in (0, 3)")
        return value

    @property
    def epsilon_fraction(self) -> Fraction:
        return Fraction(self.epsilon)


def read_config_file(path: str | os.PathLike) -> dict[str, Any]:
    """Parse a flat ``key = value`` file into settings keyword arguments.

    Keys may use the CLI spelling (``--y-max``, ``y-max``) or the field
    spelling (``y_max``); blank values are dropped.
    """
    values = dotenv_values(path)
    parsed: dict[str, Any] = {}
    for key, value in values.items():
        if value is None or value == "":
            continue
        parsed[key.strip().lstrip("-").replace("-", "_").lower()] = value
    return parsed


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()


settings = get_settings()
