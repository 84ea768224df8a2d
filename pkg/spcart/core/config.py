# spcart/core/config.py
"""Toolkit configuration (Pydantic Settings v2)."""

from functools import lru_cache
from pathlib import Path
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # .env is picked up automatically; unknown keys are ignored.
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore"
    )

    # Output
    output_dir: Path = Field(Path("results"), validation_alias="SPCART_OUTPUT_DIR")
    csv_digits: int = Field(6, validation_alias="SPCART_CSV_DIGITS", ge=1, le=17)

    # Solvers
    max_iterations: int = Field(200, validation_alias="SPCART_MAX_ITERATIONS", ge=1)
    rel_change_tol: float = Field(0.01, validation_alias="SPCART_REL_CHANGE_TOL")

    # Execution
    cache_ttl_s: float = Field(300.0, validation_alias="SPCART_CACHE_TTL_S")
    workers: int = Field(1, validation_alias="SPCART_WORKERS", ge=1)

    # Logging
    log_level: str = Field("INFO", validation_alias="LOG_LEVEL")
    log_file: Optional[Path] = Field(None, validation_alias="LOG_FILE")

    # ---- validators / conveniences ----
    @field_validator("output_dir")
    @classmethod
    def _absolute_output_dir(cls, v: Path) -> Path:
        """Resolve relative output directories against the working directory."""
        if not v.is_absolute():
            v = (Path.cwd() / v).resolve()
        return v

    @field_validator("rel_change_tol", "cache_ttl_s")
    @classmethod
    def _positive(cls, v: float) -> float:
        if v <= 0:
            raise ValueError("must be positive")
        return v

    @field_validator("log_level")
    @classmethod
    def _upper_level(cls, v: str) -> str:
        return v.upper()


@lru_cache
def get_settings() -> Settings:
    """Use this to avoid re-parsing env on every import."""
    return Settings()
