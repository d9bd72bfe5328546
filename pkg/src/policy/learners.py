"""Pluggable value learners behind the policies."""

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from typing import Any, Literal, Optional, Protocol, runtime_checkable

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .errors import PolicyError

LearnerKind = Literal["gp-sarsa", "linear-sarsa"]


class LearnerConfig(BaseModel):
    """Hyperparameters shared by the learners; unused ones are ignored per kind."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: LearnerKind = "gp-sarsa"
    gamma: float = Field(default=0.99, ge=0.0, le=1.0)
    nu: float = Field(default=0.01, gt=0.0)
    sigma: float = Field(default=5.0, gt=0.0)
    white_noise: float = Field(default=0.001, ge=0.0)
    epsilon: float = Field(default=0.3, ge=0.0, le=1.0)
    epsilon_final: float = Field(default=0.05, ge=0.0, le=1.0)
    max_dictionary: Optional[int] = Field(default=None, ge=1)
    learning_rate: float = Field(default=0.01, gt=0.0)


@dataclass(frozen=True)
class Transition:
    """One SARSA step; ``next_summary``/``next_action`` are None on the terminal step."""

    summary: np.ndarray
    action: str
    reward: float
    next_summary: Optional[np.ndarray]
    next_action: Optional[str]
    terminal: bool

    def __post_init__(self) -> None:
        if not self.terminal and (self.next_summary is None or self.next_action is None):
            raise PolicyError("non-terminal transition without a successor")


@runtime_checkable
class PolicyLearner(Protocol):
    kind: str
    actions: tuple[str, ...]
    dimension: int

    def q_values(self, summary: np.ndarray) -> dict[str, float]: ...

    def select_action(
        self, summary: np.ndarray, allowed: Sequence[str], explore: bool, rng: np.random.Generator
    ) -> str: ...

    def observe(self, transition: Transition) -> None: ...

    def end_episode(self) -> None: ...

    def anneal(self, progress: float) -> None: ...

    def to_state(self) -> dict[str, Any]: ...


def greedy(values: Mapping[str, float], allowed: Sequence[str]) -> str:
    """Argmax over ``allowed``; ties go to the lexicographically first name."""
    if not allowed:
        raise PolicyError("no allowed action")
    best = None
    for name in sorted(allowed):
        if best is None or values[name] > values[best]:
            best = name
    return best


def annealed_epsilon(config: LearnerConfig, progress: float) -> float:
    progress = min(max(progress, 0.0), 1.0)
    return config.epsilon + (config.epsilon_final - config.epsilon) * progress


class LearnerBase:
    """Action bookkeeping and input checks shared by the learners."""

    kind = ""

    def __init__(self, actions: Sequence[str], dimension: int, config: LearnerConfig):
        if not actions:
            raise PolicyError("a learner needs at least one action")
        if len(set(actions)) != len(actions):
            raise PolicyError(f"duplicate action names in {list(actions)}")
        if dimension < 1:
            raise PolicyError(f"summary dimension must be positive, got {dimension}")
        self.actions = tuple(actions)
        self.dimension = dimension
        self.config = config
        self.epsilon = config.epsilon

    def anneal(self, progress: float) -> None:
        self.epsilon = annealed_epsilon(self.config, progress)

    def _vector(self, summary: np.ndarray) -> np.ndarray:
        x = np.asarray(summary, dtype=float)
        if x.shape != (self.dimension,):
            raise PolicyError(f"summary of shape {x.shape} given to a learner of dimension {self.dimension}")
        return x

    def _check_action(self, action: str) -> None:
        if action not in self.actions:
            raise PolicyError(f"unknown action '{action}'")

    def _check_allowed(self, allowed: Sequence[str]) -> None:
        if not allowed:
            raise PolicyError("no allowed action")
        for name in allowed:
            self._check_action(name)

    def _base_state(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "actions": list(self.actions),
            "dimension": self.dimension,
            "config": self.config.model_dump(),
            "epsilon": self.epsilon,
        }


def learner_from_state(state: Mapping[str, Any]) -> PolicyLearner:
    from .gpsarsa import GPSarsaLearner
    from .linear import LinearSarsaLearner

    kinds = {GPSarsaLearner.kind: GPSarsaLearner, LinearSarsaLearner.kind: LinearSarsaLearner}
    try:
        cls = kinds[state["kind"]]
    except KeyError:
        raise PolicyError(f"unknown learner kind {state.get('kind')!r}") from None
    return cls.from_state(state)


def make_learner(config: LearnerConfig, actions: Sequence[str], dimension: int) -> PolicyLearner:
    from .gpsarsa import GPSarsaLearner
    from .linear import LinearSarsaLearner

    if config.kind == "gp-sarsa":
        return GPSarsaLearner(actions, dimension, config)
    return LinearSarsaLearner(actions, dimension, config)
