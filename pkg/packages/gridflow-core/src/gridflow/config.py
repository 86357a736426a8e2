"""Configuration management for gridflow."""

import os
from enum import StrEnum
from functools import lru_cache
from typing import Any, Literal

from pydantic import BaseModel, Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class StartMode(StrEnum):
    """Initial voltage profile of a power-flow solve."""

    FLAT = "flat"
    NONFLAT = "nonflat"


class Settings(BaseSettings):
    """Gridflow configuration.

    Configuration can be set via environment variables with GRIDFLOW_ prefix.
    Example: GRIDFLOW_TOLERANCE=1e-4
    """

    model_config = SettingsConfigDict(
        env_prefix="GRIDFLOW_",
        env_file=".env",
        env_file_encoding="utf-8",
    )

    # Solver defaults - mismatch threshold in per-unit on the system base
    tolerance: float = 1e-3
    max_iterations: int = 30
    start: StartMode = StartMode.NONFLAT

    # Worker threads - None means one per CPU
    threads: int | None = None

    # Work-item granularity; independent of the thread count so results stay bitwise stable
    level_chunk_size: int = 64
    row_chunk_size: int = 2048

    # Benchmark methodology
    bench_repeats: int = 5
    bench_warmup: int = 1

    # Thresholds applied by --check
    check_max_angle_deg: float = 0.01
    check_max_vm_pu: float = 0.001

    top_k: int = 10
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "WARNING"

    def resolved_threads(self) -> int:
        """Worker count with the hardware default applied."""
        return self.threads or os.cpu_count() or 1


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Get cached settings instance.

    Uses lru_cache to avoid re-parsing environment/files on each call.
    """
    return Settings()


class SolverOptions(BaseModel):
    """Options shared by every fast decoupled solve in one run."""

    tolerance: float = Field(default=1e-3, gt=0, description="Mismatch threshold (per-unit)")
    max_iterations: int = Field(default=30, ge=1, description="Maximum P/Q iteration pairs")
    start: StartMode = Field(default=StartMode.NONFLAT, description="Initial voltage profile")
    threads: int = Field(default=1, ge=1, description="Worker threads")

    @classmethod
    def from_settings(cls, settings: Settings | None = None, **overrides: Any) -> "SolverOptions":
        """Build options from settings, letting explicit overrides win.

        Args:
            settings: Settings to read defaults from (cached settings if omitted).
            **overrides: Field values taking precedence; None values are ignored.

        Returns:
            Validated SolverOptions.
        """
        settings = settings or get_settings()
        values: dict[str, Any] = {
            "tolerance": settings.tolerance,
            "max_iterations": settings.max_iterations,
            "start": settings.start,
            "threads": settings.resolved_threads(),
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)
