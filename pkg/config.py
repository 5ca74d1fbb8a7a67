# config.py
"""
Runtime settings. Values come from DISTRIB_* environment variables or a
local .env file (see .env.example); CLI flags override them per call.
"""
from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="DISTRIB_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    materialization_cap: int = Field(2**20, gt=0, description="Largest term (in tree nodes) a unifier may expand to")
    expand_cap: int = Field(2**20, gt=0, description="Longest string an SLP may be decompressed to")
    ta_budget: int = Field(10**7, gt=0, description="Rule-application budget of the baseline")
    saturation_budget: int = Field(10**6, gt=0, description="Safety budget of the polynomial deciders")
    check_invariants: bool = Field(False, description="Assert the bookkeeping lemmas while saturating")
    trace: bool = Field(False, description="Record one trace entry per rule application")
    log_level: str = "WARNING"
    bench_workers: int = Field(4, ge=1)
    api_host: str = "0.0.0.0"
    api_port: int = 8000
    cors_origins: list[str] = ["http://localhost:5173", "http://127.0.0.1:5173"]


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings()
