"""Common policy interface and per-learner episode bookkeeping."""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from src.acts.models import DialogueAct
from src.entities.models import ConversationalWorld
from src.ontology.models import KnowledgeBase
from src.tracking.merging import FocusStateResult

from .learners import PolicyLearner, Transition


@dataclass(frozen=True)
class PolicyContext:
    """Everything a policy may look at when acting for one object."""

    world: ConversationalWorld
    object_id: str
    kb: KnowledgeBase
    focus_state: FocusStateResult


@dataclass(frozen=True)
class SystemDecision:
    act: DialogueAct
    actions: tuple[str, ...] = ()

    @property
    def addresses_relation(self) -> bool:
        return any(name.startswith("confirm_rel_") for name in self.actions)


@dataclass
class _Step:
    summary: np.ndarray
    action: str
    reward: float = 0.0


@dataclass
class EpisodeBuffer:
    """
    Steps one learner took in the current dialogue.

    Rewards arriving before the first step are dropped; later rewards
    accumulate on the most recent step until the learner acts again.
    """

    steps: list[_Step] = field(default_factory=list)

    def push(self, summary: np.ndarray, action: str) -> None:
        self.steps.append(_Step(np.asarray(summary, dtype=float), action))

    def reward(self, value: float) -> None:
        if self.steps:
            self.steps[-1].reward += value

    def __len__(self) -> int:
        return len(self.steps)

    def transitions(self, final_reward: float = 0.0) -> list[Transition]:
        if not self.steps:
            return []
        self.steps[-1].reward += final_reward
        out = []
        for step, successor in zip(self.steps, self.steps[1:] + [None]):
            out.append(
                Transition(
                    summary=step.summary,
                    action=step.action,
                    reward=step.reward,
                    next_summary=None if successor is None else successor.summary,
                    next_action=None if successor is None else successor.action,
                    terminal=successor is None,
                )
            )
        return out

    def clear(self) -> None:
        self.steps.clear()


def flush(buffer: EpisodeBuffer, learner: Optional[PolicyLearner], final_reward: float, learn: bool) -> int:
    """Feed a finished episode to ``learner``; returns the number of transitions."""
    transitions = buffer.transitions(final_reward)
    if learn and learner is not None:
        for transition in transitions:
            learner.observe(transition)
        learner.end_episode()
    buffer.clear()
    return len(transitions)


class DialoguePolicy(ABC):
    """A policy acting on behalf of one conversational object."""

    kind: str = ""

    @abstractmethod
    def act(self, context: PolicyContext, explore: bool, rng: np.random.Generator) -> SystemDecision:
        pass

    def record(self, reward: float) -> None:
        pass

    def end_episode(self, final_reward: float, learn: bool = True) -> None:
        pass

    def anneal(self, progress: float) -> None:
        pass

    @property
    def trainable(self) -> bool:
        return False

    def to_state(self) -> dict[str, Any]:
        return {"kind": self.kind}
