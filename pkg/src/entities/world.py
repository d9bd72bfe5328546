"""World construction, context updates, focus handling and state dumps."""

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import replace

from loguru import logger

from src.ontology.models import EQUALS, NAME_SLOT, ObjectTypeDef
from src.ontology.relations import derive_relations

from .models import (
    NOT_EQUALS,
    ContextState,
    ConversationalObject,
    ConversationalRelation,
    ConversationalWorld,
    RelationContextState,
    WorldError,
)


def relation_id(object_a: str, object_b: str) -> str:
    return f"{object_a}-{object_b}"


def new_world(types: Sequence[tuple[str, ObjectTypeDef]]) -> ConversationalWorld:
    """
    Build a predefined world with fresh beliefs and an empty focus.

    One relation is created per object pair (in declaration order) whose
    types share at least one concept.

    Raises:
        WorldError: On duplicate entity ids
    """
    ids = [entity_id for entity_id, _ in types]
    if len(set(ids)) != len(ids):
        raise WorldError(f"duplicate entity id in {ids}")
    objects = {entity_id: ConversationalObject.fresh(entity_id, type_def) for entity_id, type_def in types}
    relations = {}
    for i, (id_a, type_a) in enumerate(types):
        for id_b, type_b in types[i + 1:]:
            attributes = derive_relations(type_a, type_b)
            if attributes:
                rel_id = relation_id(id_a, id_b)
                if rel_id in objects:
                    raise WorldError(f"relation id '{rel_id}' clashes with an object id")
                relations[rel_id] = ConversationalRelation.fresh(rel_id, (id_a, id_b), tuple(attributes))
    return ConversationalWorld(objects, relations)


def update_context(obj: ConversationalObject, offered: Mapping[str, str]) -> ContextState:
    """
    Context state after offering ``offered`` for ``obj``; the latest offer wins.

    Raises:
        WorldError: If the record does not belong to the object's type
    """
    type_def = obj.type_def
    if NAME_SLOT not in offered:
        raise WorldError(f"offer for '{obj.id}' has no name")
    for slot in type_def.informable_slots:
        if offered.get(slot) not in type_def.values(slot):
            raise WorldError(f"record '{offered[NAME_SLOT]}' is not of type '{type_def.name}'")
    return ContextState(offered=dict(offered))


def update_relation_context(
    rel: ConversationalRelation, context_a: ContextState, context_b: ContextState
) -> RelationContextState:
    """Relation facts implied by the endpoint offers (``context_a`` belongs to ``rel.endpoints[0]``)."""
    if context_a.is_empty or context_b.is_empty:
        return RelationContextState()
    return RelationContextState(
        attributes={
            attr.name: EQUALS if context_a.value(attr.slot_a) == context_b.value(attr.slot_b) else NOT_EQUALS
            for attr in rel.attributes
        }
    )


def refresh_relation_contexts(world: ConversationalWorld, object_id: str) -> None:
    for rel in world.relations_of(object_id):
        a, b = rel.endpoints
        context = update_relation_context(rel, world.object(a).context, world.object(b).context)
        world.put(replace(rel, context=context))


def apply_offer(world: ConversationalWorld, object_id: str, record: Mapping[str, str]) -> ConversationalObject:
    """Store ``record`` as the object's offer and refresh the contexts of its relations."""
    obj = world.object(object_id)
    context = update_context(obj, record)
    offered = obj.history.offered | {slot for slot in record if obj.type_def.is_informable(slot)}
    names = obj.offered_names
    if context.name not in names:
        names = names + (context.name,)
    obj = replace(
        obj,
        context=context,
        history=replace(obj.history, offered=frozenset(offered)),
        offered_names=names,
        alternatives_requested=False,
    )
    world.put(obj)
    refresh_relation_contexts(world, object_id)
    logger.trace(f"Offer for {object_id}: {context.name}")
    return obj


def set_focus(world: ConversationalWorld, entity_ids: Iterable[str]) -> ConversationalWorld:
    """
    Replace the focus of attention.

    Raises:
        UnknownEntityError: If an id is not declared
    """
    world.focus = frozenset(entity_ids)
    return world


def current_focus(world: ConversationalWorld) -> frozenset[str]:
    return world.focus


def activate_relation(world: ConversationalWorld, rel_id: str) -> None:
    rel = world.relation(rel_id)
    if not rel.active:
        world.put(replace(rel, active=True))


def dump_world(world: ConversationalWorld, places: int = 4) -> str:
    """Deterministic multi-line text dump of every entity."""
    wb = world.world_belief
    lines = [
        f"world greeted={int(wb.greeted)} closing={int(wb.closing)} focus={','.join(sorted(world.focus)) or '-'}"
    ]
    for obj in world.objects:
        lines.append(f"object {obj.id} ({obj.type_name}) offer={obj.context.name or '-'}")
        for slot, marginal in obj.user_goal.items():
            lines.append(f"  {slot}: {marginal.format(places)}")
        if obj.pending_requests:
            lines.append(f"  pending requests: {','.join(sorted(obj.pending_requests))}")
    for rel in world.relations:
        lines.append(f"relation {rel.id} active={int(rel.active)}")
        for name, marginal in rel.user_goal.items():
            context = rel.context.value(name) or "-"
            lines.append(f"  {name}: {marginal.format(places)} context={context}")
    return "\n".join(lines)
