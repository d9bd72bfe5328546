"""One simulated dialogue: tracker, policies, simulated user and rewards."""

from collections.abc import Mapping
from dataclasses import dataclass
from typing import Optional

import numpy as np
from loguru import logger

from src.acts.models import ActType, DialogueAct, Observation
from src.entities.models import ConversationalWorld
from src.entities.world import dump_world
from src.ontology.models import KnowledgeBase, ObjectTypeDef
from src.policy.base import DialoguePolicy, PolicyContext, SystemDecision
from src.tracking.trackers import DialogueStateTracker
from src.usersim.agenda import UserSimulator
from src.usersim.error_model import apply_error_model
from src.usersim.evaluation import evaluate_success
from src.usersim.goal import sample_goal

from .episode_log import SYSTEM, USER, EpisodeLog, TurnRecord
from .run_config import RunConfig

PHASES = {"train": 0, "test": 1}


def episode_rng(seed: int, phase: str, episode: int) -> np.random.Generator:
    """Independent random stream per (seed, phase, episode)."""
    return np.random.default_rng([seed, PHASES[phase], episode])


@dataclass(frozen=True)
class Resources:
    """Ontology types and knowledge base shared by every dialogue of a run."""

    types: list[ObjectTypeDef]
    kb: KnowledgeBase

    @classmethod
    def from_config(cls, config: RunConfig) -> "Resources":
        types, kb = config.load_resources()
        return cls(types, kb)


class SystemAgent:
    """
    The dialogue system side: tracks user turns and lets the policy of the
    object in focus choose the next act.
    """

    def __init__(
        self,
        world: ConversationalWorld,
        kb: KnowledgeBase,
        policies: Mapping[str, DialoguePolicy],
        relations_enabled: bool = True,
    ):
        self.world = world
        self.kb = kb
        self.policies = policies
        self.tracker = DialogueStateTracker(world, relations_enabled)

    def open(self) -> DialogueAct:
        act = DialogueAct(ActType.HELLO)
        self.tracker.record_system_act(act)
        return act

    def observe(self, system_act: Optional[DialogueAct], observation: Observation) -> None:
        self.tracker.update(system_act, observation)

    @property
    def focus_object(self) -> str:
        return self.world.focus_object or self.world.object_ids[0]

    def act(self, explore: bool, rng: np.random.Generator) -> tuple[SystemDecision, str]:
        """Next system act and the object it was chosen for."""
        object_id = self.focus_object
        if self.world.world_belief.closing:
            return SystemDecision(DialogueAct(ActType.BYE)), object_id
        context = PolicyContext(self.world, object_id, self.kb, self.tracker.focus_state(object_id))
        decision = self.policies[object_id].act(context, explore, rng)
        self.tracker.record_system_act(decision.act)
        return decision, object_id


def run_dialogue(
    config: RunConfig,
    policies: Mapping[str, DialoguePolicy],
    rng: np.random.Generator,
    resources: Optional[Resources] = None,
    episode: int = 0,
    phase: str = "test",
    seed: int = 0,
    learn: bool = False,
    snapshots: bool = False,
) -> EpisodeLog:
    """
    Simulate one dialogue and settle its rewards.

    Every system-user exchange costs ``config.reward.turn`` and is charged to
    the object the system act was chosen for (the opening hello to the
    user's first object). An object whose exchanges reach ``max_turns`` is
    given up by the user. At the end each object's policy receives
    ``config.reward.success`` if its sub-dialogue succeeded.
    """
    resources = resources or Resources.from_config(config)
    explore = phase == "train"
    declared = config.world_spec(resources.types)
    world = config.new_world(resources.types)
    user_world = config.new_world(resources.types)

    goal = sample_goal(
        rng, resources.kb, user_world, config.order_mode, config.user.dontcare, config.user.max_requests
    )
    user = UserSimulator(goal, user_world, resources.kb, rng, config.relation_probability, config.user)
    agent = SystemAgent(world, resources.kb, policies, config.relations_enabled)
    log = EpisodeLog(episode, phase, seed, config.config_hash(), goal.order, goal.describe())
    counts = {object_id: 0 for object_id, _ in declared}
    safety_cap = config.max_turns * len(declared) + 1

    turn = 1
    system_act = agent.open()
    charged = goal.order[0]
    decision = SystemDecision(system_act)
    while True:
        counts[charged] += 1
        policies[charged].record(config.reward.turn)
        log.add(TurnRecord(turn, SYSTEM, system_act, charged, decision.actions, config.reward.turn))

        user_act = user.respond(system_act)
        observation = apply_error_model(rng, user_act, config.error_model, world, user.resolve)
        agent.observe(system_act, observation)
        log.add(
            TurnRecord(turn, USER, user_act, observation=observation, belief=dump_world(world) if snapshots else None)
        )

        if not user.finished and counts[charged] >= config.max_turns and charged == user.current:
            user.skip_object()
        if user.finished:
            break
        if sum(counts.values()) >= safety_cap:
            logger.warning(f"Episode {episode} stopped at the safety cap of {safety_cap} exchanges")
            break

        turn += 1
        decision, charged = agent.act(explore, rng)
        system_act = decision.act

    if system_act.act_type != ActType.BYE:
        log.add(TurnRecord(turn + 1, SYSTEM, DialogueAct(ActType.BYE), agent.focus_object))

    success = evaluate_success(goal, log, resources.kb, user_world)
    for object_id, _ in declared:
        won = success.get(object_id, False)
        log.success[object_id] = won
        log.turn_counts[object_id] = counts[object_id]
        log.returns[object_id] = config.reward.success * won + config.reward.turn * counts[object_id]
        policies[object_id].end_episode(config.reward.success if won else 0.0, learn=learn)
    logger.debug(
        f"Episode {phase}/{seed}/{episode}: "
        + ", ".join(f"{o} success={int(log.success[o])} turns={counts[o]}" for o in goal.order)
    )
    return log
