"""Runtime settings from the environment (prefix BULBPATCH_)"""
from functools import lru_cache
from typing import Optional

from pydantic import field_validator
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Process-level settings; experiment parameters live in the JSON config."""

    # Default experiment config path when --config is not given
    config_path: Optional[str] = None
    log_level: str = "INFO"
    workers: Optional[int] = None

    # Detector service
    api_host: str = "127.0.0.1"
    api_port: int = 8000
    debug: bool = False

    @field_validator("log_level")
    @classmethod
    def normalize_level(cls, v: str) -> str:
        level = v.upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"unknown log level '{v}'")
        return level

    @field_validator("workers")
    @classmethod
    def positive_workers(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v < 1:
            raise ValueError("workers must be >= 1")
        return v

    model_config = {"env_prefix": "BULBPATCH_", "env_file": ".env", "case_sensitive": False, "extra": "ignore"}


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance (singleton pattern)"""
    return Settings()
