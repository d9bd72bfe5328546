"""Summary actions of the feudal stack and their availability masks."""

from dataclasses import dataclass
from src._compat import StrEnum
from typing import Optional

from src.entities.models import ConversationalObject, ConversationalRelation, ConversationalWorld
from src.ontology.models import ObjectTypeDef
from src.tracking.merging import FocusStateResult


class ActionKind(StrEnum):
    REQUEST = "request"
    CONFIRM = "confirm"
    INFORM_BYCONSTRAINTS = "inform_byconstraints"
    INFORM_ALTERNATIVES = "inform_alternatives"
    INFORM_REQUESTED = "inform_requested"
    BYE = "bye"
    CONFIRM_REL = "confirm_rel"
    SELECT_OBJECT = "select_object"
    SELECT_RELATION = "select_relation"


_SLOTTED = (ActionKind.REQUEST, ActionKind.CONFIRM, ActionKind.CONFIRM_REL, ActionKind.SELECT_RELATION)


@dataclass(frozen=True, order=True)
class SummaryAction:
    kind: ActionKind
    arg: Optional[str] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ActionKind(self.kind))
        if (self.kind in _SLOTTED) != (self.arg is not None):
            raise ValueError(f"action '{self.kind}' {'needs' if self.kind in _SLOTTED else 'takes no'} argument")

    @property
    def name(self) -> str:
        return f"{self.kind.value}_{self.arg}" if self.arg is not None else self.kind.value

    def __str__(self) -> str:
        return self.name


SELECT_OBJECT = SummaryAction(ActionKind.SELECT_OBJECT)


def object_actions(type_def: ObjectTypeDef) -> tuple[SummaryAction, ...]:
    """Object sub-policy space: request/confirm per informable slot plus the inform variants and bye."""
    actions = [SummaryAction(ActionKind.REQUEST, slot) for slot in type_def.informable_slots]
    actions += [SummaryAction(ActionKind.CONFIRM, slot) for slot in type_def.informable_slots]
    actions += [
        SummaryAction(ActionKind.INFORM_BYCONSTRAINTS),
        SummaryAction(ActionKind.INFORM_ALTERNATIVES),
        SummaryAction(ActionKind.INFORM_REQUESTED),
        SummaryAction(ActionKind.BYE),
    ]
    return tuple(actions)


def relation_actions(relation: ConversationalRelation) -> tuple[SummaryAction, ...]:
    return tuple(SummaryAction(ActionKind.CONFIRM_REL, attr.name) for attr in relation.attributes)


def master_actions(world: ConversationalWorld, object_id: str) -> tuple[SummaryAction, ...]:
    """OBJECT plus one option per relation touching the object (declaration order)."""
    return (SELECT_OBJECT,) + tuple(
        SummaryAction(ActionKind.SELECT_RELATION, rel.id) for rel in world.relations_of(object_id)
    )


def object_action_allowed(action: SummaryAction, obj: ConversationalObject, focus_state: FocusStateResult) -> bool:
    has_offer = not obj.context.is_empty
    if action.kind == ActionKind.CONFIRM:
        top = focus_state.merged[action.arg].top()
        return top is not None and top[1] > 0.0
    if action.kind == ActionKind.INFORM_ALTERNATIVES:
        return has_offer and obj.alternatives_requested
    if action.kind == ActionKind.BYE:
        return has_offer
    if action.kind == ActionKind.INFORM_REQUESTED:
        return has_offer and bool(obj.pending_requests or obj.pending_confirms)
    return action.kind in (ActionKind.REQUEST, ActionKind.INFORM_BYCONSTRAINTS)


def relation_action_allowed(action: SummaryAction, relation: ConversationalRelation) -> bool:
    return action.kind == ActionKind.CONFIRM_REL and relation.equals(action.arg) > 0.0


def master_action_allowed(action: SummaryAction, world: ConversationalWorld) -> bool:
    if action.kind == ActionKind.SELECT_OBJECT:
        return True
    relation = world.relation(action.arg)
    return relation.active and any(relation_action_allowed(a, relation) for a in relation_actions(relation))

