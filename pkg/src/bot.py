"""Telegram front-end for interactive semantic-level dialogues.

Each chat gets its own dialogue with the policies of a trained run.
"""

import asyncio
import copy
import sys
from pathlib import Path
from typing import Optional

from aiogram import Bot, Dispatcher
from aiogram.client.default import DefaultBotProperties
from aiogram.enums import ParseMode
from aiogram.fsm.storage.memory import MemoryStorage
from aiogram.types import BotCommand
from loguru import logger

from src.config import PROJECT_ROOT, settings
from src.errors import ConfigError
from src.harness.evaluation import policies_for_seed
from src.harness.interactive import InteractiveSession
from src.harness.run_config import RunConfig, load_run_config
from src.harness.session import Resources
from src.log import setup_logging, setup_sentry

DEFAULT_BOT_CONFIG = PROJECT_ROOT / "configs" / "exp1_env1_cedm.yaml"


def session_factory(config: RunConfig, checkpoint_dir: Optional[Path], seed: Optional[int] = None):
    """Factory of fresh interactive sessions sharing one loaded set of policies."""
    seed = config.seeds[0] if seed is None else seed
    resources = Resources.from_config(config)
    policies = policies_for_seed(config, seed, checkpoint_dir)

    def factory() -> InteractiveSession:
        return InteractiveSession(config, copy.deepcopy(policies), resources, seed)

    return factory


async def on_startup(bot: Bot) -> None:
    """
    Execute on bot startup.

    Args:
        bot: Bot instance
    """
    logger.info("Bot is starting up...")
    logger.info(f"Environment: {settings.environment}")

    await bot.set_my_commands([
        BotCommand(command="start", description="Start a new dialogue"),
        BotCommand(command="help", description="Show the act grammar"),
        BotCommand(command="state", description="Dump the dialogue state"),
    ])
    logger.info("Bot commands set successfully")

    me = await bot.get_me()
    logger.info(f"Bot started as @{me.username} (ID: {me.id})")


async def on_shutdown(bot: Bot) -> None:
    logger.info("Bot shutdown complete")


def build_dispatcher(factory) -> Dispatcher:
    """Dispatcher with the dialogue routers and the per-chat session middleware."""
    from src.handlers import dialogue_router, help_router, start_router
    from src.middleware import DialogueSessionMiddleware, DialogueSessions

    dp = Dispatcher(storage=MemoryStorage())
    dp.startup.register(on_startup)
    dp.shutdown.register(on_shutdown)
    dp.include_router(start_router)
    dp.include_router(help_router)
    dp.include_router(dialogue_router)
    dp.message.middleware(DialogueSessionMiddleware(DialogueSessions(factory)))
    return dp


async def main(config: Optional[RunConfig] = None, checkpoint_dir: Optional[Path] = None) -> None:
    """
    Main bot execution function.

    Raises:
        ConfigError: Without a Telegram token
    """
    if not settings.telegram_bot_token:
        raise ConfigError("no Telegram token configured", location="CEDM_TELEGRAM_BOT_TOKEN")
    config = config or load_run_config(settings.bot_config or DEFAULT_BOT_CONFIG)
    checkpoint_dir = checkpoint_dir or settings.bot_checkpoints or config.resolved_output_dir() / "checkpoints"

    logger.info("Initializing bot...")
    dp = build_dispatcher(session_factory(config, checkpoint_dir))
    bot = Bot(
        token=settings.telegram_bot_token,
        default=DefaultBotProperties(parse_mode=ParseMode.HTML),
    )

    try:
        logger.info("Starting bot polling...")
        await dp.start_polling(bot, allowed_updates=dp.resolve_used_update_types())
    except Exception as e:
        logger.exception(f"Critical error in bot polling: {e}")
        raise
    finally:
        await bot.session.close()


def run() -> None:
    setup_logging()
    setup_sentry()
    try:
        asyncio.run(main())
    except KeyboardInterrupt:
        logger.info("Bot stopped by user (Ctrl+C)")
    except Exception as e:
        logger.exception(f"Fatal error: {e}")
        sys.exit(1)


if __name__ == "__main__":
    run()
