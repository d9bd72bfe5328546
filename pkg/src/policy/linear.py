"""Linear SARSA learner: Q(x, a) = w_a . x with epsilon-greedy exploration."""

from collections.abc import Mapping, Sequence
from typing import Any, Optional

import numpy as np

from .learners import LearnerBase, LearnerConfig, Transition, greedy


class LinearSarsaLearner(LearnerBase):
    kind = "linear-sarsa"

    def __init__(self, actions: Sequence[str], dimension: int, config: Optional[LearnerConfig] = None):
        super().__init__(actions, dimension, config or LearnerConfig(kind="linear-sarsa"))
        self.weights = np.zeros((len(self.actions), dimension))

    def _row(self, action: str) -> int:
        self._check_action(action)
        return self.actions.index(action)

    def q_values(self, summary: np.ndarray) -> dict[str, float]:
        values = self.weights @ self._vector(summary)
        return {action: float(value) for action, value in zip(self.actions, values)}

    def select_action(
        self, summary: np.ndarray, allowed: Sequence[str], explore: bool, rng: np.random.Generator
    ) -> str:
        self._check_allowed(allowed)
        if explore and rng.random() < self.epsilon:
            names = sorted(allowed)
            return names[int(rng.integers(len(names)))]
        return greedy(self.q_values(summary), allowed)

    def observe(self, transition: Transition) -> None:
        row = self._row(transition.action)
        x = self._vector(transition.summary)
        target = transition.reward
        if not transition.terminal:
            next_row = self._row(transition.next_action)
            target += self.config.gamma * float(self.weights[next_row] @ self._vector(transition.next_summary))
        error = target - float(self.weights[row] @ x)
        self.weights[row] += self.config.learning_rate * error * x

    def end_episode(self) -> None:
        pass

    def to_state(self) -> dict[str, Any]:
        state = self._base_state()
        state["weights"] = self.weights.tolist()
        return state

    @classmethod
    def from_state(cls, state: Mapping[str, Any]) -> "LinearSarsaLearner":
        learner = cls(state["actions"], int(state["dimension"]), LearnerConfig(**state["config"]))
        learner.weights = np.array(state["weights"], dtype=float).reshape(len(learner.actions), learner.dimension)
        learner.epsilon = float(state["epsilon"])
        return learner
