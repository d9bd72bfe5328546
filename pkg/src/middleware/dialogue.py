"""Dialogue middleware for injecting the chat's interactive session into handlers."""

import time
from typing import Any, Awaitable, Callable, Dict, Optional

from aiogram import BaseMiddleware
from aiogram.types import Message, TelegramObject
from loguru import logger

from src.config import settings
from src.harness.interactive import InteractiveSession


class DialogueSessions:
    """One interactive dialogue per chat, created on demand and dropped after ``max_idle`` seconds of silence."""

    def __init__(
        self,
        factory: Callable[[], InteractiveSession],
        max_idle: Optional[float] = None,
        clock: Callable[[], float] = time.monotonic,
    ):
        self.factory = factory
        self.max_idle = settings.bot_session_idle if max_idle is None else max_idle
        self.clock = clock
        self._sessions: dict[int, InteractiveSession] = {}
        self._last_seen: dict[int, float] = {}

    def get(self, chat_id: int) -> Optional[InteractiveSession]:
        session = self._sessions.get(chat_id)
        if session is not None:
            self._last_seen[chat_id] = self.clock()
        return session

    def start(self, chat_id: int) -> InteractiveSession:
        session = self.factory()
        self._sessions[chat_id] = session
        self._last_seen[chat_id] = self.clock()
        logger.info(f"New dialogue for chat {chat_id}")
        return session

    def drop(self, chat_id: int) -> None:
        self._sessions.pop(chat_id, None)
        self._last_seen.pop(chat_id, None)

    def evict_idle(self) -> list[int]:
        """Drop the dialogues of chats silent for longer than ``max_idle``; returns their chat ids."""
        now = self.clock()
        idle = [chat_id for chat_id, seen in self._last_seen.items() if now - seen > self.max_idle]
        for chat_id in idle:
            self.drop(chat_id)
        if idle:
            logger.info(f"Dropped {len(idle)} idle dialogue(s)")
        return idle

    def __len__(self) -> int:
        return len(self._sessions)


class DialogueSessionMiddleware(BaseMiddleware):
    """Middleware to provide the chat's dialogue to handlers."""

    def __init__(self, sessions: DialogueSessions):
        """
        Initialize dialogue middleware.

        Args:
            sessions: Per-chat session store
        """
        super().__init__()
        self.sessions = sessions

    async def __call__(
        self,
        handler: Callable[[TelegramObject, Dict[str, Any]], Awaitable[Any]],
        event: TelegramObject,
        data: Dict[str, Any],
    ) -> Any:
        """
        Inject the session store and the chat's current dialogue into handler data.

        Args:
            handler: Handler function
            event: Telegram event
            data: Handler data dictionary

        Returns:
            Handler result
        """
        self.sessions.evict_idle()
        data["sessions"] = self.sessions
        data["dialogue"] = self.sessions.get(event.chat.id) if isinstance(event, Message) else None
        return await handler(event, data)
