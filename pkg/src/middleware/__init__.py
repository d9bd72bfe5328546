"""Aiogram middleware."""

from .dialogue import DialogueSessionMiddleware, DialogueSessions

__all__ = ["DialogueSessionMiddleware", "DialogueSessions"]
