"""Semantic-level dialogue with a human typing user acts."""

from collections.abc import Callable, Mapping
from typing import Optional

import numpy as np
from loguru import logger

from src.acts.addressing import validate_act
from src.acts.grammar import parse_act, render_act
from src.acts.models import ActType, DialogueAct, Observation
from src.entities.models import ConversationalWorld
from src.entities.world import dump_world
from src.errors import CedmError
from src.policy.base import DialoguePolicy

from .run_config import RunConfig
from .session import Resources, SystemAgent

HELP_TEXT = """Type user acts in the act grammar, for example
  inform(CamRestaurants#food="british", CamRestaurants#area="centre")
  inform(CamRestaurants#area=CamHotels#area)
  request(CamRestaurants#phone)
  negate(CamHotels#stars!="4")
  affirm()   reqalts()   bye()
Commands: :state dumps the dialogue state, :help shows this text, :quit leaves."""


class InteractiveSession:
    """
    One dialogue between a human and the system. Every user act is taken
    as a certain observation; the policies act greedily.
    """

    def __init__(
        self,
        config: RunConfig,
        policies: Mapping[str, DialoguePolicy],
        resources: Optional[Resources] = None,
        seed: int = 0,
    ):
        self.config = config
        self.resources = resources or Resources.from_config(config)
        self.policies = policies
        self.rng = np.random.default_rng(seed)
        self.agent = SystemAgent(
            config.new_world(self.resources.types), self.resources.kb, policies, config.relations_enabled
        )
        self.last_system_act: Optional[DialogueAct] = None
        self.closed = False

    @property
    def world(self) -> ConversationalWorld:
        return self.agent.world

    def start(self) -> str:
        self.last_system_act = self.agent.open()
        return render_act(self.last_system_act)

    def state(self) -> str:
        return dump_world(self.world)

    def handle(self, text: str) -> str:
        """
        Process one line of user input and return the system's reply.

        Unparseable or invalid acts leave the dialogue state untouched and
        return an error message instead.
        """
        if self.closed:
            return "The dialogue is over. Start a new one."
        try:
            act = parse_act(text.strip())
            validate_act(act, self.world)
        except CedmError as e:
            logger.warning(f"Rejected user input {text!r}: {e}")
            return f"error: {e}"

        snapshot = self.world.copy()
        try:
            self.agent.observe(self.last_system_act, Observation.certain(act))
            decision, _ = self.agent.act(explore=False, rng=self.rng)
        except CedmError as e:
            self._restore(snapshot)
            logger.warning(f"Could not process {text!r}: {e}")
            return f"error: {e}"
        self.last_system_act = decision.act
        if act.act_type == ActType.BYE or decision.act.act_type == ActType.BYE:
            self.closed = True
        return render_act(decision.act)

    def _restore(self, snapshot: ConversationalWorld) -> None:
        self.agent.world = snapshot
        self.agent.tracker.world = snapshot


def run_repl(
    session: InteractiveSession,
    read: Callable[[str], str] = input,
    write: Callable[[str], None] = print,
) -> None:
    """Read-eval-print loop over ``session`` until bye, ``:quit`` or end of input."""
    write(HELP_TEXT)
    write(f"system: {session.start()}")
    while not session.closed:
        try:
            line = read("user> ")
        except EOFError:
            break
        command = line.strip()
        if not command:
            continue
        if command == ":quit":
            break
        if command == ":help":
            write(HELP_TEXT)
        elif command == ":state":
            write(session.state())
        else:
            write(f"system: {session.handle(command)}")
