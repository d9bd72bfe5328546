"""Help and state command handlers."""

from typing import Optional

from aiogram import Router
from aiogram.filters import Command
from aiogram.types import Message
from aiogram.utils.text_decorations import html_decoration as hd

from src.harness.interactive import HELP_TEXT, InteractiveSession

router = Router()

NO_DIALOGUE = "No dialogue yet. Send /start to begin."


@router.message(Command("help"))
async def cmd_help(message: Message):
    """Handle /help command - show the act grammar."""
    await message.answer(
        "<b>CEDM dialogue - act grammar</b>\n\n" + hd.pre(hd.quote(HELP_TEXT.replace(":state", "/state"))),
        parse_mode="HTML",
    )


@router.message(Command("state"))
async def cmd_state(message: Message, dialogue: Optional[InteractiveSession]):
    """Handle /state command - dump entity beliefs of the chat's dialogue."""
    if dialogue is None:
        await message.answer(NO_DIALOGUE)
        return
    await message.answer(hd.pre(hd.quote(dialogue.state())), parse_mode="HTML")
