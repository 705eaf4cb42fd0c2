"""Typed runtime configuration loaded from environment variables."""

from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Defaults for tolerances and search limits; the command line can override each one."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_ignore_empty=True,
        extra="ignore",
    )

    log_level: str = Field(default="WARNING", validation_alias="DIFAM_LOG_LEVEL")

    psd_tolerance: float = Field(default=1e-6, gt=0, validation_alias="DIFAM_PSD_TOLERANCE")
    fingerprint_quantum: float = Field(
        default=1e-6, gt=0, validation_alias="DIFAM_FINGERPRINT_QUANTUM"
    )
    spectrum_tolerance: float = Field(
        default=1e-8, gt=0, validation_alias="DIFAM_SPECTRUM_TOLERANCE"
    )

    candidate_ceiling: int = Field(
        default=10_000_000, ge=1, validation_alias="DIFAM_CANDIDATE_CEILING"
    )
    batch_size: int = Field(default=4096, ge=1, validation_alias="DIFAM_BATCH_SIZE")
    workers: int = Field(default=1, ge=1, validation_alias="DIFAM_WORKERS")
    time_budget_seconds: float | None = Field(
        default=None, gt=0, validation_alias="DIFAM_TIME_BUDGET_SECONDS"
    )

    anneal_iterations: int = Field(
        default=200_000, ge=1, validation_alias="DIFAM_ANNEAL_ITERATIONS"
    )
    anneal_temperature: float = Field(
        default=2.0, gt=0, validation_alias="DIFAM_ANNEAL_TEMPERATURE"
    )
    anneal_cooling: float = Field(
        default=0.9995, gt=0, lt=1, validation_alias="DIFAM_ANNEAL_COOLING"
    )


@lru_cache
def get_settings() -> Settings:
    """Build settings once per process."""
    return Settings()
