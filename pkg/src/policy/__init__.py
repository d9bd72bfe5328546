"""Dialogue policies: feudal CEDM stack, multi-domain baseline and handcrafted rules."""

from .actions import ActionKind, SummaryAction, master_actions, object_actions, relation_actions
from .base import DialoguePolicy, EpisodeBuffer, PolicyContext, SystemDecision
from .checkpoint import (
    POLICY_KINDS,
    load_checkpoint,
    load_policies,
    make_policy,
    policy_from_state,
    save_policies,
)
from .errors import CheckpointError, PolicyError
from .feudal import FeudalPolicyStack
from .gpsarsa import GPSarsaLearner
from .handcrafted import HandcraftedPolicy
from .learners import LearnerConfig, PolicyLearner, Transition, make_learner
from .linear import LinearSarsaLearner
from .mddm import MddmPolicy
from .rendering import to_master_act
from .summary import BeliefSummary, focus_constraints, summarize, summarize_master, summarize_relation

__all__ = [
    "POLICY_KINDS",
    "ActionKind",
    "BeliefSummary",
    "CheckpointError",
    "DialoguePolicy",
    "EpisodeBuffer",
    "FeudalPolicyStack",
    "GPSarsaLearner",
    "HandcraftedPolicy",
    "LearnerConfig",
    "LinearSarsaLearner",
    "MddmPolicy",
    "PolicyContext",
    "PolicyError",
    "PolicyLearner",
    "SummaryAction",
    "SystemDecision",
    "Transition",
    "focus_constraints",
    "load_checkpoint",
    "load_policies",
    "make_learner",
    "make_policy",
    "master_actions",
    "object_actions",
    "policy_from_state",
    "relation_actions",
    "save_policies",
    "summarize",
    "summarize_master",
    "summarize_relation",
    "to_master_act",
]
