"""
GP-SARSA: sparse online Monte-Carlo GP temporal-difference learning of Q.

The kernel over (summary, action) points is a Kronecker delta on actions
times a linear kernel on the summaries, plus white noise on identical
points. The dictionary grows only when a point is not approximately
spanned by the current dictionary (kernel-span test against ``nu``).
"""

from collections.abc import Mapping, Sequence
from typing import Any, Optional

import numpy as np
from loguru import logger

from .errors import PolicyError
from .learners import LearnerBase, LearnerConfig, Transition, greedy


class GPSarsaLearner(LearnerBase):
    kind = "gp-sarsa"

    def __init__(self, actions: Sequence[str], dimension: int, config: Optional[LearnerConfig] = None):
        super().__init__(actions, dimension, config or LearnerConfig())
        self.points = np.zeros((0, dimension))
        self.point_actions: list[str] = []
        self.k_inv = np.zeros((0, 0))
        self.alpha = np.zeros(0)
        self.cov = np.zeros((0, 0))
        self._reset_episode()

    @property
    def sigma2(self) -> float:
        return self.config.sigma**2

    @property
    def dictionary_size(self) -> int:
        return len(self.point_actions)

    def _reset_episode(self) -> None:
        self._open = False
        self._k_prev = np.zeros(self.dictionary_size)
        self._a_prev = np.zeros(self.dictionary_size)
        self._c = np.zeros(self.dictionary_size)
        self._d = 0.0
        self._s_inv = 0.0

    # kernel

    def kernel(self, x: np.ndarray, action: str, y: np.ndarray, other_action: str) -> float:
        if action != other_action:
            return 0.0
        value = float(x @ y)
        if np.array_equal(x, y):
            value += self.config.white_noise
        return value

    def _k_vector(self, x: np.ndarray, action: str) -> np.ndarray:
        if not self.point_actions:
            return np.zeros(0)
        same = np.array([a == action for a in self.point_actions])
        values = self.points @ x
        values = values + self.config.white_noise * np.all(self.points == x, axis=1)
        return np.where(same, values, 0.0)

    # posterior

    def q_mean(self, summary: np.ndarray, action: str) -> float:
        self._check_action(action)
        x = self._vector(summary)
        return float(self._k_vector(x, action) @ self.alpha)

    def q_variance(self, summary: np.ndarray, action: str) -> float:
        self._check_action(action)
        x = self._vector(summary)
        k = self._k_vector(x, action)
        return max(self.kernel(x, action, x, action) - float(k @ self.cov @ k), 0.0)

    def q_values(self, summary: np.ndarray) -> dict[str, float]:
        return {action: self.q_mean(summary, action) for action in self.actions}

    def select_action(
        self, summary: np.ndarray, allowed: Sequence[str], explore: bool, rng: np.random.Generator
    ) -> str:
        """Greedy on the posterior mean, or Thompson sampling plus an epsilon floor when exploring."""
        self._check_allowed(allowed)
        if not explore:
            return greedy(self.q_values(summary), allowed)
        names = sorted(allowed)
        if rng.random() < self.epsilon:
            return names[int(rng.integers(len(names)))]
        sampled = {
            name: float(rng.normal(self.q_mean(summary, name), np.sqrt(self.q_variance(summary, name))))
            for name in names
        }
        return greedy(sampled, names)

    # learning

    def _grow(self, x: np.ndarray, action: str, a: np.ndarray, delta: float) -> None:
        m = self.dictionary_size
        k_inv = np.zeros((m + 1, m + 1))
        k_inv[:m, :m] = delta * self.k_inv + np.outer(a, a)
        k_inv[:m, m] = -a
        k_inv[m, :m] = -a
        k_inv[m, m] = 1.0
        self.k_inv = k_inv / delta
        self.points = np.vstack([self.points, x])
        self.point_actions.append(action)
        self.alpha = np.append(self.alpha, 0.0)
        cov = np.zeros((m + 1, m + 1))
        cov[:m, :m] = self.cov
        self.cov = cov

    def _can_grow(self) -> bool:
        limit = self.config.max_dictionary
        return limit is None or self.dictionary_size < limit

    def _start(self, x: np.ndarray, action: str) -> None:
        k = self._k_vector(x, action)
        ktt = self.kernel(x, action, x, action)
        a = self.k_inv @ k
        delta = ktt - float(k @ a)
        if delta > self.config.nu and self._can_grow():
            self._grow(x, action, a, delta)
            k = np.append(k, ktt)
            a = np.zeros(self.dictionary_size)
            a[-1] = 1.0
        self._open = True
        self._k_prev = k
        self._a_prev = a
        self._c = np.zeros(self.dictionary_size)
        self._d = 0.0
        self._s_inv = 0.0

    def _step(self, reward: float, x: Optional[np.ndarray], action: Optional[str]) -> None:
        gamma, sigma2 = self.config.gamma, self.sigma2
        m = self.dictionary_size
        if x is None:
            k, ktt = np.zeros(m), 0.0
            a, delta = np.zeros(m), 0.0
        else:
            k = self._k_vector(x, action)
            ktt = self.kernel(x, action, x, action)
            a = self.k_inv @ k
            delta = ktt - float(k @ a)

        k_prev, a_prev, c_prev = self._k_prev, self._a_prev, self._c
        scale = gamma * sigma2 * self._s_inv
        dk = k_prev - gamma * k
        d = scale * self._d + reward - float(dk @ self.alpha)

        if x is not None and delta > self.config.nu and self._can_grow():
            cov_dk = self.cov @ dk
            self._grow(x, action, a, delta)
            h = np.append(a_prev, -gamma)
            dktt = float(a_prev @ (k_prev - 2.0 * gamma * k)) + gamma**2 * ktt
            c = scale * np.append(c_prev, 0.0) + h - np.append(cov_dk, 0.0)
            s = (
                (1.0 + gamma**2) * sigma2
                + dktt
                - float(dk @ cov_dk)
                + 2.0 * scale * float(c_prev @ dk)
                - gamma * sigma2 * scale
            )
            k = np.append(k, ktt)
            a = np.zeros(self.dictionary_size)
            a[-1] = 1.0
        else:
            h = a_prev - gamma * a
            c = scale * c_prev + h - self.cov @ dk
            s = (1.0 + gamma**2) * sigma2 + float(dk @ (c + scale * c_prev)) - gamma * sigma2 * scale

        if s <= 0.0:
            raise PolicyError(f"non-positive residual variance {s!r}")
        self.alpha = self.alpha + c * (d / s)
        self.cov = self.cov + np.outer(c, c) / s
        self._k_prev, self._a_prev, self._c, self._d, self._s_inv = k, a, c, d, 1.0 / s

    def observe(self, transition: Transition) -> None:
        """Feed one SARSA step; steps of an episode must arrive in order."""
        self._check_action(transition.action)
        x = self._vector(transition.summary)
        if not self._open:
            self._start(x, transition.action)
        if transition.terminal:
            self._step(transition.reward, None, None)
            self._reset_episode()
            return
        self._check_action(transition.next_action)
        self._step(transition.reward, self._vector(transition.next_summary), transition.next_action)

    def end_episode(self) -> None:
        if self._open:
            logger.trace("GP-SARSA episode closed without a terminal step")
        self._reset_episode()

    # persistence

    def to_state(self) -> dict[str, Any]:
        state = self._base_state()
        state.update(
            points=self.points.tolist(),
            point_actions=list(self.point_actions),
            k_inv=self.k_inv.tolist(),
            alpha=self.alpha.tolist(),
            cov=self.cov.tolist(),
        )
        return state

    @classmethod
    def from_state(cls, state: Mapping[str, Any]) -> "GPSarsaLearner":
        learner = cls(state["actions"], int(state["dimension"]), LearnerConfig(**state["config"]))
        m = len(state["point_actions"])
        learner.points = np.array(state["points"], dtype=float).reshape(m, learner.dimension)
        learner.point_actions = list(state["point_actions"])
        learner.k_inv = np.array(state["k_inv"], dtype=float).reshape(m, m)
        learner.alpha = np.array(state["alpha"], dtype=float).reshape(m)
        learner.cov = np.array(state["cov"], dtype=float).reshape(m, m)
        learner.epsilon = float(state["epsilon"])
        for action in learner.point_actions:
            learner._check_action(action)
        learner._reset_episode()
        return learner
