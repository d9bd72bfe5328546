"""Logging and error-tracking setup shared by the CLI and the bot."""

import sys
from pathlib import Path
from typing import Optional

from loguru import logger

from src.config import settings

LOG_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - <level>{message}</level>"
)
FILE_FORMAT = "{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {name}:{function}:{line} - {message}"


def setup_logging(level: Optional[str] = None) -> None:
    logger.remove()  # Remove default handler
    logger.add(sys.stderr, format=LOG_FORMAT, level=level or settings.log_level)


def add_file_sink(directory: Path, name: str = "cedm.log", level: Optional[str] = None) -> int:
    """Log into the run output directory as well; returns the sink id."""
    directory.mkdir(parents=True, exist_ok=True)
    return logger.add(directory / name, rotation="10 MB", format=FILE_FORMAT, level=level or settings.log_level)


def setup_sentry() -> bool:
    """Initialise Sentry when ``CEDM_SENTRY_DSN`` is set."""
    if not settings.sentry_dsn:
        return False
    import sentry_sdk

    sentry_sdk.init(dsn=settings.sentry_dsn, environment=settings.environment, traces_sample_rate=0.0)
    logger.info("Sentry error tracking enabled")
    return True
