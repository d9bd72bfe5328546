"""Multi-domain baseline: one object policy per object, blind to relations."""

import numpy as np

from src.tracking.merging import compute_focus_state

from .base import PolicyContext, SystemDecision
from .feudal import OBJECT, LearnedPolicy, allowed_object_actions
from .rendering import to_master_act
from .summary import summarize


class MddmPolicy(LearnedPolicy):
    """
    The object sub-policy alone, over the object's own belief. Relation
    beliefs are never merged in and no relation act is ever produced.
    """

    kind = "mddm-baseline"

    def act(self, context: PolicyContext, explore: bool, rng: np.random.Generator) -> SystemDecision:
        own_state = compute_focus_state(context.world, context.object_id, relations_enabled=False)
        own_context = PolicyContext(context.world, context.object_id, context.kb, own_state)
        actions, allowed = allowed_object_actions(own_context)
        summary = summarize(context.world, context.object_id, own_state, context.kb)
        action = self.choose(OBJECT, actions, allowed, summary, explore, rng)
        act = to_master_act(action, context.world, context.object_id, context.kb, own_state)
        return SystemDecision(act=act, actions=(action.name,))
