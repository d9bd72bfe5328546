"""Task success of a finished dialogue against the (final) user goal."""

from collections.abc import Iterable, Mapping
from typing import Optional, Protocol, Union

from src.acts.models import ActType, DialogueAct
from src.entities.models import ConversationalWorld
from src.ontology.models import NAME_SLOT, NO_VENUE, KnowledgeBase

from .goal import UserGoal


class HasSystemActs(Protocol):
    def system_acts(self) -> list[DialogueAct]: ...


def _acts(episode: Union[HasSystemActs, Iterable[DialogueAct]]) -> list[DialogueAct]:
    if hasattr(episode, "system_acts"):
        return list(episode.system_acts())
    return list(episode)


def final_offers(system_acts: Iterable[DialogueAct], object_ids: Iterable[str]) -> dict[str, Optional[str]]:
    """Name of the last venue the system informed about, per object."""
    offers: dict[str, Optional[str]] = {object_id: None for object_id in object_ids}
    for act in system_acts:
        if act.act_type != ActType.INFORM:
            continue
        for object_id in offers:
            name = act.literal(object_id, NAME_SLOT)
            if name is not None and name != NO_VENUE:
                offers[object_id] = name
    return offers


def _informed_slots(system_acts: Iterable[DialogueAct], object_id: str, name: str) -> set[str]:
    slots: set[str] = set()
    for act in system_acts:
        if act.act_type == ActType.INFORM and act.literal(object_id, NAME_SLOT) == name:
            slots |= {f.slot for f in act.fillers_for(object_id)}
    return slots


def evaluate_success(
    goal: UserGoal,
    episode: Union[HasSystemActs, Iterable[DialogueAct]],
    kb: KnowledgeBase,
    world: ConversationalWorld,
) -> dict[str, bool]:
    """
    Per-object success flags.

    An object succeeds iff its final offer satisfies every literal
    constraint of the final goal, every non-stale related slot agrees with
    the other object's final offer (when that object has one), and every
    requested slot was informed for the final venue.
    """
    acts = _acts(episode)
    offers = final_offers(acts, goal.order)
    records: dict[str, Optional[Mapping[str, str]]] = {
        object_id: None if name is None else kb.record_by_name(goal.objects[object_id].type_name, name)
        for object_id, name in offers.items()
    }
    success = {}
    for object_id in goal.order:
        object_goal = goal.objects[object_id]
        record = records[object_id]
        if record is None:
            success[object_id] = False
            continue
        ok = all(record.get(slot) == value for slot, value in object_goal.literal_constraints.items())
        for slot in object_goal.constraints:
            for related in goal.related_slots(world, object_id, slot):
                other = records.get(related.other_object)
                if other is None or not goal.is_valid(world, object_id, related):
                    continue
                ok = ok and record.get(slot) == other.get(related.other_slot)
        informed = _informed_slots(acts, object_id, record[NAME_SLOT])
        ok = ok and all(slot in informed for slot in object_goal.requests)
        success[object_id] = ok
    return success
