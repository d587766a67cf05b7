"""
Runtime settings loaded from the environment.
"""
import os
from functools import lru_cache
from typing import Literal

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator

load_dotenv()

ENV_PREFIX = "PSURGERY_"

LogLevel = Literal["DEBUG", "INFO", "WARNING", "ERROR"]


class Settings(BaseModel):
    """Tunable bounds and defaults for synthesis and certification."""

    sigma: int = Field(default=16, ge=1)
    distance_cap: int = Field(default=8, ge=1, le=12)
    fault_cap: int = Field(default=4, ge=1, le=8)
    cheeger_exhaustive_limit: int = Field(default=20, ge=1, le=24)
    cheeger_samples: int = Field(default=2000, ge=1)
    degree_bound: int = Field(default=6, ge=2)
    matching_congestion: int = Field(default=4, ge=1)
    cycle_congestion: int = Field(default=4, ge=1)
    max_matching_length: int = Field(default=8, ge=1)
    max_cycle_length: int = Field(default=12, ge=3)
    graph_retries: int = Field(default=25, ge=1)
    adapter_retries: int = Field(default=4, ge=1)
    seed: int = 7
    log_level: LogLevel = "WARNING"
    experimental_single_window: bool = False

    @field_validator("log_level", mode="before")
    @classmethod
    def upper_log_level(cls, v):
        if isinstance(v, str):
            return v.upper()
        return v


def _env_overrides() -> dict:
    overrides = {}
    for name in Settings.model_fields:
        raw = os.getenv(f"{ENV_PREFIX}{name.upper()}")
        if raw is not None:
            overrides[name] = raw
    return overrides


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Settings from the environment (and an optional .env file), cached per process."""
    return Settings(**_env_overrides())
