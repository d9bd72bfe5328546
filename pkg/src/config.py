"""Configuration management for the CEDM dialogue framework."""

from pathlib import Path
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-wide settings loaded from environment variables (prefix ``CEDM_``)."""

    model_config = SettingsConfigDict(
        env_prefix="CEDM_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Output Configuration
    output_root: Optional[Path] = Field(
        default=None,
        description="Overrides the output directory of every run config"
    )
    database_url: Optional[str] = Field(
        default=None,
        description="Results store URL; defaults to SQLite inside the run output directory"
    )

    # Execution Configuration
    workers: int = Field(
        default=1,
        description="Worker processes used to run seeds in parallel"
    )

    # Telegram front-end (optional)
    telegram_bot_token: Optional[str] = Field(
        default=None,
        description="Telegram Bot API token for `interact --telegram`"
    )
    bot_config: Optional[Path] = Field(
        default=None,
        description="Run config the bot serves; defaults to the Experiment 1 CEDM config"
    )
    bot_checkpoints: Optional[Path] = Field(
        default=None,
        description="Checkpoint directory with trained policies for the bot"
    )
    bot_session_idle: float = Field(
        default=3600.0,
        gt=0.0,
        description="Seconds without a message after which a chat's dialogue is dropped"
    )

    # Logging Configuration
    log_level: str = Field(default="INFO", description="Logging level")
    sentry_dsn: Optional[str] = Field(
        default=None,
        description="Sentry DSN for error tracking"
    )

    # Environment
    environment: str = Field(
        default="development",
        description="Environment: development, staging, production"
    )

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate log level."""
        allowed_levels = {"TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL"}
        v_upper = v.upper()
        if v_upper not in allowed_levels:
            raise ValueError(f"Invalid log level. Must be one of {allowed_levels}")
        return v_upper

    @field_validator("environment")
    @classmethod
    def validate_environment(cls, v: str) -> str:
        """Validate environment."""
        allowed_envs = {"development", "staging", "production"}
        v_lower = v.lower()
        if v_lower not in allowed_envs:
            raise ValueError(f"Invalid environment. Must be one of {allowed_envs}")
        return v_lower

    @field_validator("workers")
    @classmethod
    def validate_workers(cls, v: int) -> int:
        if v < 1:
            raise ValueError("workers must be at least 1")
        return v

    @property
    def is_production(self) -> bool:
        """Check if running in production."""
        return self.environment == "production"


# Global settings instance
settings = Settings()


# Project paths
PROJECT_ROOT = Path(__file__).parent.parent
SRC_ROOT = PROJECT_ROOT / "src"
TESTS_ROOT = PROJECT_ROOT / "tests"
DATA_ROOT = PROJECT_ROOT / "data"
DEFAULT_ONTOLOGY_PATH = DATA_ROOT / "ontology" / "cambridge.yaml"
