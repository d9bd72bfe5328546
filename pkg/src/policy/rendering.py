"""Turns summary actions into master-space dialogue acts."""

from collections.abc import Mapping
from typing import Optional

from src.acts.models import ActType, DialogueAct, Literal, Negated, RelationRef, SlotFiller
from src.entities.models import ConversationalWorld
from src.entities.world import apply_offer
from src.ontology.models import NAME_SLOT, NO_VENUE, KnowledgeBase
from src.tracking.merging import FocusStateResult

from .actions import ActionKind, SummaryAction
from .errors import PolicyError
from .summary import focus_constraints, offer_matches


def _constraint_fillers(object_id: str, slots: tuple[str, ...], values: Mapping[str, str]) -> list[SlotFiller]:
    return [SlotFiller(object_id, slot, Literal(values[slot])) for slot in slots if slot in values]


def _offer_act(world: ConversationalWorld, object_id: str, record: Mapping[str, str], constraints: Mapping[str, str]):
    apply_offer(world, object_id, record)
    slots = world.object(object_id).type_def.informable_slots
    fillers = [SlotFiller(object_id, NAME_SLOT, Literal(record[NAME_SLOT]))]
    fillers += _constraint_fillers(object_id, slots, {slot: record[slot] for slot in constraints})
    return DialogueAct(ActType.INFORM, tuple(fillers))


def _no_venue_act(object_id: str, slots: tuple[str, ...], constraints: Mapping[str, str], previous: str = ""):
    fillers = [SlotFiller(object_id, NAME_SLOT, Literal(NO_VENUE))]
    if previous:
        fillers.append(SlotFiller(object_id, NAME_SLOT, Negated(previous)))
    fillers += _constraint_fillers(object_id, slots, constraints)
    return DialogueAct(ActType.INFORM, tuple(fillers))


def inform_byconstraints(
    world: ConversationalWorld, object_id: str, kb: KnowledgeBase, focus_state: FocusStateResult
) -> DialogueAct:
    """Offer a venue matching the top values of the focus state, keeping a still-matching offer."""
    obj = world.object(object_id)
    constraints = focus_constraints(focus_state)
    if not obj.context.is_empty and offer_matches(obj.context.offered, constraints):
        record = kb.record_by_name(obj.type_name, obj.context.name) or dict(obj.context.offered)
        return _offer_act(world, object_id, record, constraints)
    matches = kb.query(obj.type_name, constraints)
    if not matches:
        return _no_venue_act(object_id, obj.type_def.informable_slots, constraints)
    return _offer_act(world, object_id, matches[0], constraints)


def inform_alternatives(
    world: ConversationalWorld, object_id: str, kb: KnowledgeBase, focus_state: FocusStateResult
) -> DialogueAct:
    obj = world.object(object_id)
    constraints = focus_constraints(focus_state)
    matches = kb.query(obj.type_name, constraints, exclude_names=obj.offered_names)
    if not matches:
        return _no_venue_act(object_id, obj.type_def.informable_slots, constraints, obj.context.name or "")
    return _offer_act(world, object_id, matches[0], constraints)


def inform_requested(world: ConversationalWorld, object_id: str, kb: KnowledgeBase) -> DialogueAct:
    """Answer the user's pending requests and confirms about the current offer."""
    obj = world.object(object_id)
    if obj.context.is_empty:
        raise PolicyError(f"'{object_id}' has no offer to talk about")
    record = kb.record_by_name(obj.type_name, obj.context.name) or dict(obj.context.offered)
    slots = sorted(obj.pending_requests)
    slots += [slot for slot, _ in obj.pending_confirms if slot not in slots]
    fillers = [SlotFiller(object_id, NAME_SLOT, Literal(record[NAME_SLOT]))]
    fillers += [SlotFiller(object_id, slot, Literal(record.get(slot, NO_VENUE))) for slot in slots]
    return DialogueAct(ActType.INFORM, tuple(fillers))


def to_master_act(
    action: SummaryAction,
    world: ConversationalWorld,
    focus_object: str,
    kb: KnowledgeBase,
    focus_state: FocusStateResult,
    relation_id: Optional[str] = None,
) -> DialogueAct:
    """
    Render a sub-policy action as an act in the master space.

    Offer-producing actions store the chosen record as the object's
    context, which also refreshes the contexts of its relations.
    """
    kind = action.kind
    if kind == ActionKind.REQUEST:
        return DialogueAct(ActType.REQUEST, (SlotFiller(focus_object, action.arg),))
    if kind == ActionKind.CONFIRM:
        top = focus_state.merged[action.arg].top()
        if top is None:
            raise PolicyError(f"nothing to confirm for {focus_object}#{action.arg}")
        return DialogueAct(ActType.CONFIRM, (SlotFiller(focus_object, action.arg, Literal(top[0])),))
    if kind == ActionKind.INFORM_BYCONSTRAINTS:
        return inform_byconstraints(world, focus_object, kb, focus_state)
    if kind == ActionKind.INFORM_ALTERNATIVES:
        return inform_alternatives(world, focus_object, kb, focus_state)
    if kind == ActionKind.INFORM_REQUESTED:
        return inform_requested(world, focus_object, kb)
    if kind == ActionKind.BYE:
        return DialogueAct(ActType.BYE)
    if kind == ActionKind.CONFIRM_REL:
        candidates = [world.relation(relation_id)] if relation_id else world.relations_of(focus_object)
        rel = next((r for r in candidates if action.arg in r.user_goal), None)
        if rel is None:
            raise PolicyError(f"no relation of '{focus_object}' has attribute '{action.arg}'")
        attr = rel.attribute(action.arg)
        a, b = rel.endpoints
        return DialogueAct(ActType.CONFIRM, (SlotFiller(a, attr.slot_a, RelationRef(b, attr.slot_b)),))
    raise PolicyError(f"'{action.name}' is not a sub-policy action")
