"""Rule-based object policy."""

import numpy as np

from src.ontology.models import NONE_VALUE

from .actions import ActionKind, SummaryAction
from .base import DialoguePolicy, PolicyContext, SystemDecision
from .rendering import to_master_act
from .summary import focus_constraints, offer_matches


class HandcraftedPolicy(DialoguePolicy):
    """
    Fixed rule chain, first match wins:

    1. answer pending requests/confirms about the offer
    2. offer an alternative after reqalts
    3. re-offer when the offer no longer matches or the user negated
    4. request the first unfilled slot while more than one venue matches
    5. offer by constraints
    """

    kind = "handcrafted"

    def choose(self, context: PolicyContext) -> SummaryAction:
        obj = context.world.object(context.object_id)
        focus_state = context.focus_state
        constraints = focus_constraints(focus_state)
        has_offer = not obj.context.is_empty

        if has_offer and (obj.pending_requests or obj.pending_confirms):
            return SummaryAction(ActionKind.INFORM_REQUESTED)
        if has_offer and obj.alternatives_requested:
            return SummaryAction(ActionKind.INFORM_ALTERNATIVES)
        if has_offer and (obj.user_negated or not offer_matches(obj.context.offered, constraints)):
            return SummaryAction(ActionKind.INFORM_BYCONSTRAINTS)
        unfilled = [s for s in obj.type_def.informable_slots if focus_state.merged[s].argmax() == NONE_VALUE]
        if unfilled and len(context.kb.query(obj.type_name, constraints)) > 1:
            return SummaryAction(ActionKind.REQUEST, unfilled[0])
        return SummaryAction(ActionKind.INFORM_BYCONSTRAINTS)

    def act(self, context: PolicyContext, explore: bool, rng: np.random.Generator) -> SystemDecision:
        action = self.choose(context)
        act = to_master_act(action, context.world, context.object_id, context.kb, context.focus_state)
        return SystemDecision(act=act, actions=(action.name,))
