from unittest.mock import AsyncMock, MagicMock

import pytest
from aiogram import Dispatcher
from aiogram.types import Message

from src import bot
from src.config import settings
from src.errors import ConfigError
from src.handlers.dialogue import handle_act
from src.handlers.help import NO_DIALOGUE, cmd_help, cmd_state
from src.handlers.start import cmd_start
from src.middleware.dialogue import DialogueSessionMiddleware, DialogueSessions


@pytest.fixture
def sessions(make_config):
    return DialogueSessions(bot.session_factory(make_config(), None))


def make_message(text="", chat_id=42):
    message = MagicMock()
    message.text = text
    message.chat.id = chat_id
    message.answer = AsyncMock()
    return message


def answered(message) -> str:
    return message.answer.await_args.args[0]


async def test_start_opens_dialogue(sessions):
    message = make_message("/start")
    await cmd_start(message, sessions)
    assert len(sessions) == 1
    assert "system: <code>hello()</code>" in answered(message)


async def test_act_without_dialogue(sessions):
    message = make_message('inform(CamHotels#kind="guesthouse")')
    await handle_act(message, None, sessions)
    assert answered(message) == NO_DIALOGUE


async def test_act_is_answered(sessions):
    dialogue = sessions.start(42)
    dialogue.start()
    message = make_message('inform(CamHotels#kind="guesthouse")')
    await handle_act(message, dialogue, sessions)
    assert answered(message).startswith("<code>request(CamHotels#")


async def test_bye_drops_dialogue(sessions):
    dialogue = sessions.start(42)
    dialogue.start()
    message = make_message("bye()")
    await handle_act(message, dialogue, sessions)
    assert "dialogue finished" in answered(message)
    assert sessions.get(42) is None


async def test_state_and_help(sessions):
    message = make_message("/state")
    await cmd_state(message, None)
    assert answered(message) == NO_DIALOGUE

    dialogue = sessions.start(42)
    dialogue.start()
    await cmd_state(message, dialogue)
    assert "world greeted=" in answered(message)

    await cmd_help(message)
    assert "/state dumps the dialogue state" in answered(message)


async def test_middleware_injects_chat_dialogue(sessions):
    dialogue = sessions.start(7)
    event = MagicMock(spec=Message)
    event.chat = MagicMock(id=7)
    handler = AsyncMock(return_value="done")
    data = {}

    assert await DialogueSessionMiddleware(sessions)(handler, event, data) == "done"
    assert data["dialogue"] is dialogue
    assert data["sessions"] is sessions
    handler.assert_awaited_once_with(event, data)


class FakeClock:
    def __init__(self):
        self.now = 0.0

    def __call__(self) -> float:
        return self.now


def test_idle_dialogues_are_evicted(make_config):
    clock = FakeClock()
    sessions = DialogueSessions(bot.session_factory(make_config(), None), max_idle=60.0, clock=clock)
    sessions.start(1)
    sessions.start(2)
    clock.now = 50.0
    assert sessions.get(2) is not None
    clock.now = 90.0
    assert sessions.evict_idle() == [1]
    assert sessions.get(1) is None
    assert len(sessions) == 1
    clock.now = 200.0
    assert sessions.evict_idle() == [2]
    assert len(sessions) == 0


async def test_middleware_drops_idle_dialogue(make_config):
    clock = FakeClock()
    sessions = DialogueSessions(bot.session_factory(make_config(), None), max_idle=60.0, clock=clock)
    sessions.start(7)
    clock.now = 61.0
    event = MagicMock(spec=Message)
    event.chat = MagicMock(id=7)
    data = {}
    await DialogueSessionMiddleware(sessions)(AsyncMock(), event, data)
    assert data["dialogue"] is None
    assert len(sessions) == 0


def test_sessions_do_not_share_policies(sessions):
    a, b = sessions.start(1), sessions.start(2)
    assert a is not b
    assert a.policies["CamHotels"] is not b.policies["CamHotels"]


def test_build_dispatcher(sessions):
    assert isinstance(bot.build_dispatcher(sessions.factory), Dispatcher)


async def test_main_needs_token(monkeypatch):
    monkeypatch.setattr(settings, "telegram_bot_token", None)
    with pytest.raises(ConfigError, match="Telegram token"):
        await bot.main()
