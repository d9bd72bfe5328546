"""Mapping acts onto the entities of a conversational world."""

from typing import Optional, Protocol

from src.errors import CedmError
from src.ontology.models import NAME_SLOT, TYPE_SLOT, ObjectTypeDef

from .models import WORLD, ActError, DialogueAct, RelationRef, SlotFiller


class UnknownEntityError(CedmError):
    """Raised when an act or a lookup names an entity the world does not declare."""
    pass


class WorldDescription(Protocol):
    """What acts need to know about a world."""

    @property
    def object_ids(self) -> tuple[str, ...]: ...

    def object_type(self, object_id: str) -> ObjectTypeDef: ...

    def relation_id_between(self, object_a: str, object_b: str) -> Optional[str]: ...


def _check_slot(world: WorldDescription, entity: str, slot: str) -> ObjectTypeDef:
    if entity not in world.object_ids:
        raise UnknownEntityError(f"entity '{entity}' is not declared in this world")
    type_def = world.object_type(entity)
    if not type_def.accepts_slot(slot):
        raise ActError(f"type '{type_def.name}' has no slot '{slot}'")
    return type_def


def _check_relation_ref(world: WorldDescription, filler: SlotFiller) -> str:
    ref = filler.value
    assert isinstance(ref, RelationRef)
    type_a = _check_slot(world, filler.entity, filler.slot)
    type_b = _check_slot(world, ref.entity, ref.slot)
    if filler.slot in (NAME_SLOT, TYPE_SLOT) or ref.slot in (NAME_SLOT, TYPE_SLOT):
        raise ActError("relation references connect informable slots only")
    if not (type_a.is_informable(filler.slot) and type_b.is_informable(ref.slot)):
        raise ActError(f"{filler.entity}#{filler.slot} and {ref.entity}#{ref.slot} are not both informable")
    concept = type_a.concept(filler.slot)
    if concept is None or concept != type_b.concept(ref.slot):
        raise ActError(f"{filler.entity}#{filler.slot} and {ref.entity}#{ref.slot} do not share a concept")
    relation_id = world.relation_id_between(filler.entity, ref.entity)
    if relation_id is None:
        raise UnknownEntityError(f"no relation between '{filler.entity}' and '{ref.entity}'")
    return relation_id


def validate_act(act: DialogueAct, world: WorldDescription) -> None:
    """
    Check every filler of ``act`` against the world.

    Raises:
        UnknownEntityError: If an entity or relation is not declared
        ActError: If a slot is unknown or a relation reference crosses concepts
    """
    for filler in act.fillers:
        if filler.is_relation:
            _check_relation_ref(world, filler)
        else:
            _check_slot(world, filler.entity, filler.slot)


def addressed_entity_of(act: DialogueAct, world: WorldDescription) -> str:
    """
    Return the single entity an act is about.

    Acts without fillers belong to the world, relation-valued fillers to the
    relation between the two referenced objects, anything else to the one
    object its fillers name.

    Raises:
        UnknownEntityError: If the act names an undeclared entity
        ActError: If literal fillers address two different objects
    """
    validate_act(act, world)
    if not act.fillers:
        return WORLD
    for filler in act.fillers:
        if filler.is_relation:
            return _check_relation_ref(world, filler)
    entities = {filler.entity for filler in act.fillers}
    if len(entities) > 1:
        raise ActError(f"act addresses several objects {sorted(entities)}")
    return entities.pop()


def focus_object_of(act: DialogueAct, world: WorldDescription) -> Optional[str]:
    """The object an act moves the focus to; None for world-level acts."""
    validate_act(act, world)
    if not act.fillers:
        return None
    return act.fillers[0].entity
