"""Centralized environment configuration for hetfuse."""

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-level settings loaded from the environment (and an optional .env file).

    These only affect diagnostics and scheduling; experiment results are fully
    determined by the run configuration and its seed.
    """

    model_config = SettingsConfigDict(
        env_prefix="HETFUSE_", env_file=".env", extra="ignore"
    )

    # Logging
    loglevel: str = Field(default="INFO", description="Diagnostics log level")

    # Harness scheduling
    max_workers: int = Field(
        default=4, ge=1, description="Concurrent runs when harness parallelism is on"
    )


# Global settings instance
settings = Settings()
