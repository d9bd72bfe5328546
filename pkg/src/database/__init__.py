"""Database package initialization."""

from .connection import create_engine, create_session_pool, database_url, init_db
from .models import Base, EpisodeResult, ExperimentRun

__all__ = [
    "Base",
    "EpisodeResult",
    "ExperimentRun",
    "create_engine",
    "create_session_pool",
    "database_url",
    "init_db",
]
