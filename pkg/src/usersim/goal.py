"""User goals with related slots shared between objects."""

from collections.abc import Mapping
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np
from loguru import logger

from src.entities.models import ConversationalWorld
from src.errors import CedmError
from src.ontology.models import DONTCARE, NAME_SLOT, KnowledgeBase

OrderMode = Literal["fixed", "alternating"]

MAX_GOAL_RETRIES = 100


class SimulationError(CedmError):
    """Raised when the simulated user cannot be set up (e.g. no satisfiable goal)."""
    pass


@dataclass(frozen=True)
class ObjectGoal:
    object_id: str
    type_name: str
    constraints: Mapping[str, str]
    requests: tuple[str, ...]
    target: Mapping[str, str]

    @property
    def literal_constraints(self) -> dict[str, str]:
        return {slot: value for slot, value in self.constraints.items() if value != DONTCARE}


@dataclass(frozen=True)
class RelationGoal:
    """Relation attributes the user intends to hold with EQUALS."""

    relation_id: str
    endpoints: tuple[str, str]
    attributes: tuple[str, ...]


@dataclass(frozen=True)
class RelatedSlot:
    relation_id: str
    attribute: str
    other_object: str
    other_slot: str


@dataclass
class UserGoal:
    objects: dict[str, ObjectGoal]
    relations: dict[str, RelationGoal]
    order: tuple[str, ...]
    changes: list[tuple[str, str, str, str]] = field(default_factory=list)

    def object_goal(self, object_id: str) -> ObjectGoal:
        try:
            return self.objects[object_id]
        except KeyError:
            raise SimulationError(f"the goal has no object '{object_id}'") from None

    def related_slots(self, world: ConversationalWorld, object_id: str, slot: str) -> list[RelatedSlot]:
        """Goal relations connecting ``object_id#slot`` to another object."""
        out = []
        for rel_goal in self.relations.values():
            if object_id not in rel_goal.endpoints:
                continue
            rel = world.relation(rel_goal.relation_id)
            other = rel.other(object_id)
            for name in rel_goal.attributes:
                attr = rel.attribute(name)
                if rel.slot_of(attr, object_id) == slot:
                    out.append(RelatedSlot(rel.id, name, other, rel.slot_of(attr, other)))
        return out

    def is_valid(self, world: ConversationalWorld, object_id: str, related: RelatedSlot) -> bool:
        """A related slot is stale once either side's constraint changed away from the other's."""
        rel = world.relation(related.relation_id)
        attr = rel.attribute(related.attribute)
        own = self.objects[object_id].constraints.get(rel.slot_of(attr, object_id))
        other = self.objects[related.other_object].constraints.get(related.other_slot)
        return own is not None and own == other and own != DONTCARE

    def change_constraint(self, object_id: str, slot: str, value: str, target: Mapping[str, str]) -> None:
        goal = self.object_goal(object_id)
        old = goal.constraints.get(slot, DONTCARE)
        constraints = dict(goal.constraints)
        constraints[slot] = value
        self.objects[object_id] = replace(goal, constraints=constraints, target=dict(target))
        self.changes.append((object_id, slot, old, value))
        logger.debug(f"Goal change for {object_id}: {slot} {old} -> {value}")

    def describe(self) -> str:
        lines = []
        for object_id in self.order:
            goal = self.objects[object_id]
            constraints = ", ".join(f"{s}={v}" for s, v in goal.constraints.items())
            requests = ",".join(goal.requests) or "-"
            lines.append(f"goal {object_id}: {constraints} requests={requests} target={goal.target[NAME_SLOT]}")
        for rel_goal in self.relations.values():
            lines.append(f"goal {rel_goal.relation_id}: {','.join(rel_goal.attributes) or '-'}")
        return "\n".join(lines)


def _non_empty_subsets(items: tuple[str, ...]) -> list[tuple[str, ...]]:
    return [
        tuple(item for bit, item in enumerate(items) if mask >> bit & 1) for mask in range(1, 2 ** len(items))
    ]


def _order(rng: np.random.Generator, world: ConversationalWorld, order_mode: OrderMode) -> tuple[str, ...]:
    ids = world.object_ids
    if order_mode == "fixed":
        return ids
    return tuple(ids[i] for i in rng.permutation(len(ids)))


def sample_goal(
    rng: np.random.Generator,
    kb: KnowledgeBase,
    world: ConversationalWorld,
    order_mode: OrderMode = "fixed",
    dontcare_probability: float = 0.1,
    max_requests: int = 2,
    retries: int = MAX_GOAL_RETRIES,
) -> UserGoal:
    """
    Sample a satisfiable goal.

    Each relation of the world gets a uniform non-empty subset of its
    attributes as related slots. Objects are sampled in dialogue order: the
    first draws a uniform target record, later ones a record agreeing with
    the earlier targets on every related slot. Constraints are the target's
    values, with DONTCARE on unrelated slots at ``dontcare_probability``.

    Raises:
        SimulationError: If no satisfiable goal is found within ``retries`` attempts
    """
    order = _order(rng, world, order_mode)
    for attempt in range(retries):
        relations = {}
        for rel in world.relations:
            names = tuple(attr.name for attr in rel.attributes)
            subsets = _non_empty_subsets(names)
            chosen = subsets[int(rng.integers(len(subsets)))]
            relations[rel.id] = RelationGoal(rel.id, rel.endpoints, chosen)

        targets: dict[str, Mapping[str, str]] = {}
        related_by_object: dict[str, set[str]] = {object_id: set() for object_id in order}
        satisfiable = True
        for object_id in order:
            type_name = world.object(object_id).type_name
            required = {}
            for rel_goal in relations.values():
                if object_id not in rel_goal.endpoints:
                    continue
                rel = world.relation(rel_goal.relation_id)
                other = rel.other(object_id)
                for name in rel_goal.attributes:
                    attr = rel.attribute(name)
                    slot = rel.slot_of(attr, object_id)
                    related_by_object[object_id].add(slot)
                    if other in targets:
                        required[slot] = targets[other][rel.slot_of(attr, other)]
            candidates = kb.query(type_name, required)
            if not candidates:
                satisfiable = False
                break
            targets[object_id] = candidates[int(rng.integers(len(candidates)))]
        if not satisfiable:
            logger.trace(f"Goal attempt {attempt + 1} unsatisfiable")
            continue

        objects = {}
        for object_id in order:
            type_def = world.object(object_id).type_def
            target = targets[object_id]
            constraints = {}
            for slot in type_def.informable_slots:
                free = slot not in related_by_object[object_id]
                constraints[slot] = DONTCARE if free and rng.random() < dontcare_probability else target[slot]
            extra = [s for s in type_def.requestable_slots if not type_def.is_informable(s) and s != NAME_SLOT]
            n_requests = min(int(rng.integers(0, max_requests + 1)), len(extra))
            picked = sorted(rng.choice(len(extra), size=n_requests, replace=False)) if n_requests else []
            requests = tuple(extra[i] for i in picked)
            objects[object_id] = ObjectGoal(object_id, type_def.name, constraints, requests, dict(target))
        return UserGoal(objects=objects, relations=relations, order=order)
    raise SimulationError(f"no satisfiable goal after {retries} attempts")

