"""Telegram command handlers."""

from .dialogue import router as dialogue_router
from .help import router as help_router
from .start import router as start_router

__all__ = ["start_router", "help_router", "dialogue_router"]
