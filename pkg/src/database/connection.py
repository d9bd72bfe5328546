"""Database connection management."""

from pathlib import Path
from typing import Optional

from sqlalchemy import Engine, create_engine as sa_create_engine
from sqlalchemy.orm import Session, sessionmaker

from src.config import settings
from .models import Base

RESULTS_DB = "results.db"


def database_url(output_dir: Optional[Path] = None) -> str:
    """``CEDM_DATABASE_URL`` if set, else a SQLite file in the run output directory."""
    if settings.database_url:
        return settings.database_url
    directory = Path(output_dir or ".")
    directory.mkdir(parents=True, exist_ok=True)
    return f"sqlite:///{directory / RESULTS_DB}"


def create_engine(url: Optional[str] = None, output_dir: Optional[Path] = None) -> Engine:
    """
    Create SQLAlchemy engine.

    Args:
        url: Database URL; resolved with ``database_url`` when omitted
        output_dir: Run output directory holding the default SQLite file

    Returns:
        Engine instance
    """
    return sa_create_engine(
        url or database_url(output_dir),
        echo=settings.log_level == "DEBUG",
        pool_pre_ping=True,
    )


def create_session_pool(engine: Engine) -> sessionmaker:
    """
    Create session factory.

    Args:
        engine: SQLAlchemy engine

    Returns:
        sessionmaker instance
    """
    return sessionmaker(engine, class_=Session, expire_on_commit=False)


def init_db(engine: Engine) -> None:
    """
    Initialize database tables.

    Args:
        engine: SQLAlchemy engine
    """
    Base.metadata.create_all(engine)
