from functools import lru_cache
from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


ENV_FILE = Path(__file__).resolve().parents[2] / ".env"


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=str(ENV_FILE),
        env_file_encoding="utf-8",
        env_prefix="PREFIQS_",
        extra="ignore",
    )

    tool_version: str = "0.1.0"
    log_level: str = "INFO"
    log_file: str = "logs/prefiqs.log"

    # PREFIQS_THREADS; caps the worker pool, never changes outputs
    threads: int | None = Field(default=None, ge=1)

    default_fmr: float = 1e-2
    grid_step: float = 0.01
    grid_max: float = 0.95
    pauc_max_discard: float = 0.3
    auc_max_discard: float = 0.95
    plot_edc: bool = True

    jvp_ratio: float = 0.1
    jvp_step: float = 1e-4
    halving_tolerance: float = 1e-3

    sweep_ratios: list[float] = Field(default_factory=lambda: [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
    sweep_random_seed: int = 1234


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings()
