"""Free-text handler: every message is one user act."""

from typing import Optional

from aiogram import F, Router
from aiogram.types import Message
from aiogram.utils.text_decorations import html_decoration as hd
from loguru import logger

from src.harness.interactive import InteractiveSession
from src.middleware.dialogue import DialogueSessions

from .help import NO_DIALOGUE

router = Router()


@router.message(F.text & ~F.text.startswith("/"))
async def handle_act(message: Message, dialogue: Optional[InteractiveSession], sessions: DialogueSessions):
    """Parse the message as a user act and answer with the system act."""
    if dialogue is None:
        await message.answer(NO_DIALOGUE)
        return
    reply = dialogue.handle(message.text)
    logger.debug(f"Chat {message.chat.id}: {message.text!r} -> {reply!r}")
    if dialogue.closed:
        sessions.drop(message.chat.id)
        reply += "\n\n(dialogue finished, /start for a new one)"
    await message.answer(hd.code(hd.quote(reply)), parse_mode="HTML")
