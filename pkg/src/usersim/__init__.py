"""Agenda-based user simulation, semantic error model and success evaluation."""

from .agenda import ObjectAgenda, UserConfig, UserSimulator, user_respond
from .error_model import ENVIRONMENTS, ErrorModelConfig, apply_error_model, confuse
from .evaluation import evaluate_success, final_offers
from .goal import ObjectGoal, RelationGoal, SimulationError, UserGoal, sample_goal

__all__ = [
    "ENVIRONMENTS",
    "ErrorModelConfig",
    "ObjectAgenda",
    "ObjectGoal",
    "RelationGoal",
    "SimulationError",
    "UserConfig",
    "UserGoal",
    "UserSimulator",
    "apply_error_model",
    "confuse",
    "evaluate_success",
    "final_offers",
    "sample_goal",
    "user_respond",
]
