"""
Feudal policy stack for one conversational object.

A master policy picks between the object sub-policy and one sub-policy per
relation of the object; the chosen sub-policy then picks the summary action.
Every policy of the stack that has acted in a dialogue receives the same
reward signal.
"""

from collections.abc import Sequence
from typing import Any, Optional

import numpy as np
from loguru import logger

from .actions import (
    SELECT_OBJECT,
    ActionKind,
    SummaryAction,
    master_action_allowed,
    master_actions,
    object_action_allowed,
    object_actions,
    relation_action_allowed,
    relation_actions,
)
from .base import DialoguePolicy, EpisodeBuffer, PolicyContext, SystemDecision, flush
from .errors import PolicyError
from .learners import LearnerConfig, PolicyLearner, learner_from_state, make_learner
from .rendering import to_master_act
from .summary import BeliefSummary, summarize, summarize_master, summarize_relation

MASTER = "master"
OBJECT = "object"


def relation_key(relation_id: str) -> str:
    return f"relation:{relation_id}"


class LearnedPolicy(DialoguePolicy):
    """Lazily created learners, each with its own episode buffer."""

    def __init__(self, config: Optional[LearnerConfig] = None):
        self.config = config or LearnerConfig()
        self.learners: dict[str, PolicyLearner] = {}
        self.buffers: dict[str, EpisodeBuffer] = {}

    @property
    def trainable(self) -> bool:
        return True

    def learner(self, key: str, actions: Sequence[SummaryAction], summary: BeliefSummary) -> PolicyLearner:
        names = tuple(action.name for action in actions)
        learner = self.learners.get(key)
        if learner is None:
            learner = make_learner(self.config, names, len(summary))
            self.learners[key] = learner
            logger.debug(f"Created {learner.kind} learner '{key}' ({len(names)} actions, dimension {len(summary)})")
        elif learner.actions != names or learner.dimension != len(summary):
            raise PolicyError(f"learner '{key}' was built for a different action space or summary")
        return learner

    def choose(
        self,
        key: str,
        actions: Sequence[SummaryAction],
        allowed: Sequence[SummaryAction],
        summary: BeliefSummary,
        explore: bool,
        rng: np.random.Generator,
    ) -> SummaryAction:
        learner = self.learner(key, actions, summary)
        by_name = {action.name: action for action in allowed}
        name = learner.select_action(summary.vector, list(by_name), explore, rng)
        self.buffers.setdefault(key, EpisodeBuffer()).push(summary.vector, name)
        return by_name[name]

    def record(self, reward: float) -> None:
        for buffer in self.buffers.values():
            buffer.reward(reward)

    def end_episode(self, final_reward: float, learn: bool = True) -> None:
        for key, buffer in self.buffers.items():
            flush(buffer, self.learners.get(key), final_reward, learn)

    def anneal(self, progress: float) -> None:
        for learner in self.learners.values():
            learner.anneal(progress)

    def to_state(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "config": self.config.model_dump(),
            "learners": {key: learner.to_state() for key, learner in sorted(self.learners.items())},
        }

    @classmethod
    def from_state(cls, state: dict[str, Any]) -> "LearnedPolicy":
        policy = cls(LearnerConfig(**state["config"]))
        policy.learners = {key: learner_from_state(value) for key, value in state["learners"].items()}
        return policy


def allowed_object_actions(context: PolicyContext) -> tuple[tuple[SummaryAction, ...], list[SummaryAction]]:
    obj = context.world.object(context.object_id)
    actions = object_actions(obj.type_def)
    return actions, [a for a in actions if object_action_allowed(a, obj, context.focus_state)]


class FeudalPolicyStack(LearnedPolicy):
    kind = "cedm"

    def act(self, context: PolicyContext, explore: bool, rng: np.random.Generator) -> SystemDecision:
        world, object_id, focus_state = context.world, context.object_id, context.focus_state

        options = master_actions(world, object_id)
        allowed = [a for a in options if master_action_allowed(a, world)]
        master_summary = summarize_master(world, object_id, focus_state, context.kb)
        choice = self.choose(MASTER, options, allowed, master_summary, explore, rng)

        if choice == SELECT_OBJECT:
            actions, allowed_actions = allowed_object_actions(context)
            summary = summarize(world, object_id, focus_state, context.kb)
            action = self.choose(OBJECT, actions, allowed_actions, summary, explore, rng)
            act = to_master_act(action, world, object_id, context.kb, focus_state)
        else:
            relation = world.relation(choice.arg)
            actions = relation_actions(relation)
            allowed_actions = [a for a in actions if relation_action_allowed(a, relation)]
            summary = summarize_relation(world, relation.id, object_id, focus_state)
            action = self.choose(relation_key(relation.id), actions, allowed_actions, summary, explore, rng)
            act = to_master_act(action, world, object_id, context.kb, focus_state, relation_id=relation.id)
        if action.kind == ActionKind.CONFIRM_REL:
            logger.trace(f"{object_id}: relation action {action.name}")
        return SystemDecision(act=act, actions=(choice.name, action.name))

