"""Conversational objects, relations and the world that holds them."""

from collections.abc import Mapping
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Optional, Union

from src.acts.addressing import UnknownEntityError
from src.acts.models import DialogueAct
from src.errors import CedmError
from src.ontology.models import EQUALS, NAME_SLOT, ObjectTypeDef, RelationAttributeDef

from .marginal import RELATION_DOMAIN, Marginal, slot_domain

NOT_EQUALS = "NOT_EQUALS"


class WorldError(CedmError):
    """Raised on invalid world construction or updates."""
    pass


def _frozen(mapping: Mapping) -> Mapping:
    return MappingProxyType(dict(mapping))


@dataclass(frozen=True)
class ContextState:
    """What the system has shared about an object: its most recent offer."""

    offered: Optional[Mapping[str, str]] = None

    def __post_init__(self) -> None:
        if self.offered is not None:
            object.__setattr__(self, "offered", _frozen(self.offered))

    @property
    def is_empty(self) -> bool:
        return self.offered is None

    @property
    def name(self) -> Optional[str]:
        return None if self.offered is None else self.offered.get(NAME_SLOT)

    def value(self, slot: str) -> Optional[str]:
        return None if self.offered is None else self.offered.get(slot)


@dataclass(frozen=True)
class RelationContextState:
    """EQUALS / NOT_EQUALS per relation attribute, derived from both endpoint offers."""

    attributes: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "attributes", _frozen(self.attributes))

    @property
    def is_empty(self) -> bool:
        return not self.attributes

    def value(self, attribute: str) -> Optional[str]:
        return self.attributes.get(attribute)


@dataclass(frozen=True)
class SlotHistory:
    """Per-slot record of what the system did: requested, confirmed, informed, offered."""

    requested: frozenset[str] = frozenset()
    confirmed: frozenset[str] = frozenset()
    informed: frozenset[str] = frozenset()
    offered: frozenset[str] = frozenset()

    def flags(self, slot: str) -> tuple[bool, bool, bool, bool]:
        return (slot in self.requested, slot in self.confirmed, slot in self.informed, slot in self.offered)


@dataclass(frozen=True)
class ConversationalObject:
    id: str
    type_def: ObjectTypeDef
    user_goal: Mapping[str, Marginal]
    context: ContextState = ContextState()
    history: SlotHistory = SlotHistory()
    last_user_act: Optional[DialogueAct] = None
    pending_requests: frozenset[str] = frozenset()
    pending_confirms: tuple[tuple[str, str], ...] = ()
    alternatives_requested: bool = False
    user_negated: bool = False
    offered_names: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "user_goal", _frozen(self.user_goal))
        if tuple(self.user_goal) != self.type_def.informable_slots:
            raise WorldError(
                f"belief slots {tuple(self.user_goal)} of '{self.id}' differ from {self.type_def.informable_slots}"
            )

    @classmethod
    def fresh(cls, object_id: str, type_def: ObjectTypeDef) -> "ConversationalObject":
        goal = {slot.name: Marginal.fresh(slot_domain(slot.values)) for slot in type_def.informable}
        return cls(id=object_id, type_def=type_def, user_goal=goal)

    @property
    def type_name(self) -> str:
        return self.type_def.name

    def belief(self, slot: str) -> Marginal:
        try:
            return self.user_goal[slot]
        except KeyError:
            raise WorldError(f"'{self.id}' has no informable slot '{slot}'") from None

    def with_belief(self, slot: str, marginal: Marginal) -> "ConversationalObject":
        goal = dict(self.user_goal)
        goal[slot] = marginal
        return replace(self, user_goal=goal)


@dataclass(frozen=True)
class ConversationalRelation:
    id: str
    endpoints: tuple[str, str]
    attributes: tuple[RelationAttributeDef, ...]
    user_goal: Mapping[str, Marginal]
    context: RelationContextState = RelationContextState()
    active: bool = False
    confirmed: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "user_goal", _frozen(self.user_goal))
        if set(self.user_goal) != {attr.name for attr in self.attributes}:
            raise WorldError(f"relation '{self.id}' beliefs do not match its attributes")

    @classmethod
    def fresh(
        cls, relation_id: str, endpoints: tuple[str, str], attributes: tuple[RelationAttributeDef, ...]
    ) -> "ConversationalRelation":
        goal = {attr.name: Marginal.fresh(RELATION_DOMAIN) for attr in attributes}
        return cls(id=relation_id, endpoints=endpoints, attributes=tuple(attributes), user_goal=goal)

    def attribute(self, name: str) -> RelationAttributeDef:
        for attr in self.attributes:
            if attr.name == name:
                return attr
        raise WorldError(f"relation '{self.id}' has no attribute '{name}'")

    def other(self, object_id: str) -> str:
        a, b = self.endpoints
        if object_id == a:
            return b
        if object_id == b:
            return a
        raise WorldError(f"'{object_id}' is not an endpoint of relation '{self.id}'")

    def slot_of(self, attribute: RelationAttributeDef, object_id: str) -> str:
        return attribute.slot_a if object_id == self.endpoints[0] else attribute.slot_b

    def attribute_for(self, object_id: str, slot: str) -> Optional[RelationAttributeDef]:
        """The attribute connecting ``object_id``'s ``slot`` to the other endpoint, if any."""
        for attr in self.attributes:
            if self.slot_of(attr, object_id) == slot:
                return attr
        return None

    def attribute_between(self, entity: str, slot: str, other_entity: str, other_slot: str) -> RelationAttributeDef:
        """Attribute for ``entity#slot=other_entity#other_slot`` in either orientation."""
        for attr in self.attributes:
            if (entity, other_entity) == self.endpoints and (slot, other_slot) == (attr.slot_a, attr.slot_b):
                return attr
            if (other_entity, entity) == self.endpoints and (other_slot, slot) == (attr.slot_a, attr.slot_b):
                return attr
        raise WorldError(f"relation '{self.id}' does not connect {entity}#{slot} and {other_entity}#{other_slot}")

    def equals(self, attribute: str) -> float:
        return self.user_goal[attribute][EQUALS]

    def with_belief(self, attribute: str, marginal: Marginal) -> "ConversationalRelation":
        goal = dict(self.user_goal)
        goal[attribute] = marginal
        return replace(self, user_goal=goal)


@dataclass(frozen=True)
class WorldBelief:
    """World-level state: greeting and closing flags."""

    greeted: bool = False
    system_greeted: bool = False
    closing: bool = False


Entity = Union[ConversationalObject, ConversationalRelation]


class ConversationalWorld:
    """
    The entities of one dialogue plus world belief and focus of attention.

    Entity states are immutable values; the world swaps them on update.
    One world belongs to one dialogue.
    """

    def __init__(
        self,
        objects: Mapping[str, ConversationalObject],
        relations: Mapping[str, ConversationalRelation],
        world_belief: WorldBelief = WorldBelief(),
        focus: frozenset[str] = frozenset(),
    ):
        self._objects = dict(objects)
        self._relations = dict(relations)
        self.world_belief = world_belief
        self._focus = frozenset(focus)
        self._check_focus(self._focus)

    @property
    def object_ids(self) -> tuple[str, ...]:
        return tuple(self._objects)

    @property
    def relation_ids(self) -> tuple[str, ...]:
        return tuple(self._relations)

    @property
    def entity_ids(self) -> tuple[str, ...]:
        return self.object_ids + self.relation_ids

    @property
    def objects(self) -> tuple[ConversationalObject, ...]:
        return tuple(self._objects.values())

    @property
    def relations(self) -> tuple[ConversationalRelation, ...]:
        return tuple(self._relations.values())

    def object(self, object_id: str) -> ConversationalObject:
        try:
            return self._objects[object_id]
        except KeyError:
            raise UnknownEntityError(f"unknown object '{object_id}'") from None

    def relation(self, relation_id: str) -> ConversationalRelation:
        try:
            return self._relations[relation_id]
        except KeyError:
            raise UnknownEntityError(f"unknown relation '{relation_id}'") from None

    def entity(self, entity_id: str) -> Entity:
        if entity_id in self._objects:
            return self._objects[entity_id]
        return self.relation(entity_id)

    def object_type(self, object_id: str) -> ObjectTypeDef:
        return self.object(object_id).type_def

    def relation_between(self, object_a: str, object_b: str) -> Optional[ConversationalRelation]:
        for relation in self._relations.values():
            if set(relation.endpoints) == {object_a, object_b}:
                return relation
        return None

    def relation_id_between(self, object_a: str, object_b: str) -> Optional[str]:
        relation = self.relation_between(object_a, object_b)
        return None if relation is None else relation.id

    def relations_of(self, object_id: str) -> tuple[ConversationalRelation, ...]:
        self.object(object_id)
        return tuple(r for r in self._relations.values() if object_id in r.endpoints)

    def put(self, entity: Entity) -> None:
        """Replace the stored state of an existing entity."""
        if isinstance(entity, ConversationalObject):
            self.object(entity.id)
            self._objects[entity.id] = entity
        else:
            self.relation(entity.id)
            self._relations[entity.id] = entity

    @property
    def focus(self) -> frozenset[str]:
        return self._focus

    @focus.setter
    def focus(self, entity_ids: frozenset[str]) -> None:
        entity_ids = frozenset(entity_ids)
        self._check_focus(entity_ids)
        self._focus = entity_ids

    @property
    def focus_object(self) -> Optional[str]:
        """The object in focus, in declaration order if several are."""
        for object_id in self._objects:
            if object_id in self._focus:
                return object_id
        return None

    def _check_focus(self, entity_ids: frozenset[str]) -> None:
        unknown = entity_ids - set(self.entity_ids)
        if unknown:
            raise UnknownEntityError(f"focus names undeclared entities {sorted(unknown)}")

    def copy(self) -> "ConversationalWorld":
        return ConversationalWorld(self._objects, self._relations, self.world_belief, self._focus)

    def __repr__(self) -> str:
        return f"ConversationalWorld(objects={list(self._objects)}, relations={list(self._relations)})"
