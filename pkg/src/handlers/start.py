"""Start command handler: opens a fresh dialogue for the chat."""

from aiogram import Router
from aiogram.filters import Command
from aiogram.types import Message
from aiogram.utils.text_decorations import html_decoration as hd

from src.middleware.dialogue import DialogueSessions

router = Router()

EXAMPLE_ACT = 'inform(CamRestaurants#food="british")'


@router.message(Command("start"))
async def cmd_start(message: Message, sessions: DialogueSessions):
    """Handle /start command - begin a new dialogue."""
    session = sessions.start(message.chat.id)
    greeting = session.start()
    await message.answer(
        "<b>New dialogue</b>\n\n"
        "Talk to me in semantic acts, e.g.\n"
        f"{hd.code(hd.quote(EXAMPLE_ACT))}\n\n"
        "/help shows the act grammar, /state the dialogue state.\n\n"
        f"system: {hd.code(hd.quote(greeting))}",
        parse_mode="HTML",
    )
