"""Per-turn belief tracking for entities and the world."""

from collections import defaultdict
from collections.abc import Sequence
from dataclasses import replace
from typing import Optional, Union

from loguru import logger

from src.acts.addressing import addressed_entity_of, focus_object_of
from src.acts.models import (
    ActType,
    DialogueAct,
    Dontcare,
    Hypothesis,
    Literal,
    Negated,
    Observation,
    RelationRef,
)
from src.entities.models import (
    ConversationalObject,
    ConversationalRelation,
    ConversationalWorld,
    Entity,
    WorldBelief,
)
from src.entities.world import activate_relation
from src.ontology.models import DONTCARE, EQUALS, NAME_SLOT

from .merging import FocusStateResult, compute_focus_state
from .rules import TrackingError, apply_rejection_discount, focus_rule_update

_EVIDENCE_ACTS = (ActType.INFORM, ActType.CONFIRM, ActType.SELECT, ActType.REQALTS, ActType.AFFIRM, ActType.NEGATE)

HypothesesLike = Union[Observation, Sequence[Hypothesis]]


def _hypotheses(observation: HypothesesLike) -> tuple[Hypothesis, ...]:
    if isinstance(observation, Observation):
        return observation.hypotheses
    return tuple(Hypothesis(*h) for h in observation)


def asserted_literals(system_act: Optional[DialogueAct], entity: str) -> dict[str, str]:
    """Slot values the system act stated for ``entity`` (informs and confirms, name excluded)."""
    if system_act is None or system_act.act_type not in (ActType.INFORM, ActType.CONFIRM):
        return {}
    return {
        f.slot: f.literal
        for f in system_act.fillers
        if f.entity == entity and f.slot != NAME_SLOT and f.literal is not None and f.literal != DONTCARE
    }


def confirmed_relation_fillers(system_act: Optional[DialogueAct]) -> list[tuple[str, str, str, str]]:
    """``(entity, slot, other_entity, other_slot)`` for every relation the system act confirms."""
    if system_act is None or system_act.act_type != ActType.CONFIRM:
        return []
    return [
        (f.entity, f.slot, f.value.entity, f.value.slot)
        for f in system_act.fillers
        if isinstance(f.value, RelationRef)
    ]


def _add(evidence: dict[str, dict[str, float]], slot: str, value: str, confidence: float) -> None:
    evidence[slot][value] = evidence[slot].get(value, 0.0) + confidence


def _normalised(values: dict[str, float]) -> dict[str, float]:
    total = sum(values.values())
    if total <= 1.0:
        return values
    return {value: conf / total for value, conf in values.items()}


def track_object(
    obj: ConversationalObject,
    system_act: Optional[DialogueAct],
    observation: HypothesesLike,
) -> ConversationalObject:
    """
    Update one object from the hypotheses addressed to it.

    Literal evidence is summed per (slot, value) over the n-best list and
    applied once with the focus rule; rejected values are discounted first.
    Relation-valued fillers carry no evidence for the object.
    """
    hypotheses = _hypotheses(observation)
    type_def = obj.type_def
    asserted = asserted_literals(system_act, obj.id)
    confirmed = system_act is not None and system_act.act_type == ActType.CONFIRM
    evidence: dict[str, dict[str, float]] = defaultdict(dict)
    rejections: list[tuple[str, str, float]] = []

    for act, confidence in hypotheses:
        if act.act_type in (ActType.HELLO, ActType.BYE) or confidence <= 0.0:
            continue
        for filler in act.fillers:
            if filler.entity != obj.id:
                if filler.is_relation:
                    continue
                raise TrackingError(f"hypothesis {act} is not addressed to '{obj.id}'")
            if filler.is_relation or not type_def.is_informable(filler.slot):
                continue
            value = filler.value
            if isinstance(value, Negated):
                if value.value in type_def.values(filler.slot):
                    rejections.append((filler.slot, value.value, confidence))
                continue
            if act.act_type not in _EVIDENCE_ACTS or not isinstance(value, (Literal, Dontcare)):
                continue
            literal = filler.literal
            if literal != DONTCARE and literal not in type_def.values(filler.slot):
                raise TrackingError(f"value '{literal}' is not declared for {obj.id}#{filler.slot}")
            _add(evidence, filler.slot, literal, confidence)
            if act.act_type == ActType.NEGATE:
                denied = asserted.get(filler.slot)
                if denied is not None and denied != literal:
                    rejections.append((filler.slot, denied, confidence))
        if not act.fillers and confirmed:
            if act.act_type == ActType.AFFIRM:
                for slot, value in asserted.items():
                    if type_def.is_informable(slot):
                        _add(evidence, slot, value, confidence)
            elif act.act_type == ActType.NEGATE:
                rejections.extend(
                    (slot, value, confidence) for slot, value in asserted.items() if type_def.is_informable(slot)
                )

    updated = obj
    for slot, value, confidence in rejections:
        updated = updated.with_belief(slot, apply_rejection_discount(updated.belief(slot), value, confidence))
    for slot, values in evidence.items():
        updated = updated.with_belief(slot, focus_rule_update(updated.belief(slot), _normalised(values)))

    if hypotheses:
        top = hypotheses[0].act
        pending_requests = updated.pending_requests
        pending_confirms = updated.pending_confirms
        if top.act_type == ActType.REQUEST:
            pending_requests = pending_requests | {
                f.slot for f in top.fillers if f.entity == obj.id and type_def.accepts_slot(f.slot)
            }
        if top.act_type == ActType.CONFIRM:
            pending_confirms = tuple(
                (f.slot, f.literal) for f in top.fillers if f.entity == obj.id and f.literal is not None
            )
        updated = replace(
            updated,
            last_user_act=top,
            pending_requests=frozenset(pending_requests),
            pending_confirms=pending_confirms,
            alternatives_requested=top.act_type == ActType.REQALTS,
            user_negated=top.act_type == ActType.NEGATE or bool(rejections),
        )
    return updated


def track_relation(
    rel: ConversationalRelation,
    system_act: Optional[DialogueAct],
    observation: HypothesesLike,
) -> ConversationalRelation:
    """
    Update a relation's {NONE, EQUALS} beliefs.

    Relation-valued fillers between the endpoints are evidence for EQUALS;
    after a system relation confirm, affirm() supports and negate(...)
    rejects the confirmed attributes.
    """
    hypotheses = _hypotheses(observation)
    endpoints = set(rel.endpoints)
    confirmed = [
        rel.attribute_between(*item).name
        for item in confirmed_relation_fillers(system_act)
        if {item[0], item[2]} == endpoints
    ]
    evidence: dict[str, dict[str, float]] = defaultdict(dict)
    rejections: list[tuple[str, float]] = []

    for act, confidence in hypotheses:
        if confidence <= 0.0:
            continue
        relation_fillers = [f for f in act.fillers if f.is_relation]
        for filler in relation_fillers:
            ref = filler.value
            if {filler.entity, ref.entity} != endpoints:
                raise TrackingError(f"hypothesis {act} does not address relation '{rel.id}'")
            if act.act_type in _EVIDENCE_ACTS:
                attr = rel.attribute_between(filler.entity, filler.slot, ref.entity, ref.slot)
                _add(evidence, attr.name, EQUALS, confidence)
        if confirmed and not relation_fillers:
            if act.act_type == ActType.AFFIRM and not act.fillers:
                for name in confirmed:
                    _add(evidence, name, EQUALS, confidence)
            elif act.act_type == ActType.NEGATE:
                rejections.extend((name, confidence) for name in confirmed)

    updated = rel
    for name, confidence in rejections:
        updated = updated.with_belief(name, apply_rejection_discount(updated.user_goal[name], EQUALS, confidence))
    for name, values in evidence.items():
        updated = updated.with_belief(name, focus_rule_update(updated.user_goal[name], _normalised(values)))
    if evidence and not updated.active:
        updated = replace(updated, active=True)
    return updated


def track_entity(
    entity: Entity,
    system_act: Optional[DialogueAct],
    observation: HypothesesLike,
) -> Entity:
    """Belief update of one conversational entity from its share of the n-best list."""
    if isinstance(entity, ConversationalObject):
        return track_object(entity, system_act, observation)
    return track_relation(entity, system_act, observation)


def track_world(
    world_belief: WorldBelief,
    system_act: Optional[DialogueAct],
    observation: HypothesesLike,
) -> WorldBelief:
    """World-level flags from the most confident hypothesis; entity content is ignored."""
    hypotheses = _hypotheses(observation)
    if not hypotheses:
        return world_belief
    top = hypotheses[0].act.act_type
    if top == ActType.HELLO:
        return replace(world_belief, greeted=True)
    if top == ActType.BYE:
        return replace(world_belief, closing=True)
    return world_belief


class DialogueStateTracker:
    """
    Routes each user turn to the entities it addresses and keeps the focus.

    With ``relations_enabled=False`` the tracker behaves like a multi-domain
    tracker: relation entities never receive evidence and focus states are
    the objects' own beliefs.
    """

    def __init__(self, world: ConversationalWorld, relations_enabled: bool = True):
        self.world = world
        self.relations_enabled = relations_enabled

    def _routes(self, act: DialogueAct, system_act: Optional[DialogueAct]) -> list[str]:
        world = self.world
        addressed_entity_of(act, world)
        confirmed = [
            world.relation_id_between(item[0], item[2]) for item in confirmed_relation_fillers(system_act)
        ]
        confirmed = [rel_id for rel_id in confirmed if rel_id is not None] if self.relations_enabled else []
        if not act.fillers:
            if act.act_type in (ActType.HELLO, ActType.BYE):
                return []
            if act.act_type in (ActType.AFFIRM, ActType.NEGATE) and confirmed:
                return confirmed
            focus = world.focus_object
            return [focus] if focus is not None else []

        targets: list[str] = []
        for filler in act.fillers:
            if filler.entity not in targets:
                targets.append(filler.entity)
            if filler.is_relation and self.relations_enabled:
                rel_id = world.relation_id_between(filler.entity, filler.value.entity)
                if rel_id is not None and rel_id not in targets:
                    targets.append(rel_id)
        if act.act_type == ActType.NEGATE:
            targets.extend(rel_id for rel_id in confirmed if rel_id not in targets)
        return targets

    def update(self, system_act: Optional[DialogueAct], observation: Observation) -> ConversationalWorld:
        """Track one user turn given the preceding system act."""
        world = self.world
        world.world_belief = track_world(world.world_belief, system_act, observation)
        for obj in world.objects:
            if obj.user_negated:
                world.put(replace(obj, user_negated=False))

        routed: dict[str, list[Hypothesis]] = defaultdict(list)
        for hypothesis in observation.hypotheses:
            for entity_id in self._routes(hypothesis.act, system_act):
                routed[entity_id].append(hypothesis)
        for entity_id in world.entity_ids:
            if entity_id in routed:
                world.put(track_entity(world.entity(entity_id), system_act, routed[entity_id]))

        top = observation.top
        if top is not None:
            focus = focus_object_of(top, world)
            if focus is not None:
                world.focus = frozenset({focus})
        logger.trace(f"Tracked {len(observation)} hypotheses; focus {sorted(world.focus)}")
        return world

    def record_system_act(self, act: DialogueAct) -> ConversationalWorld:
        """Update dialogue histories after the system acted (offers are stored by the renderer)."""
        world = self.world
        if act.act_type == ActType.HELLO:
            world.world_belief = replace(world.world_belief, system_greeted=True)
            return world
        for object_id in act.entities():
            if object_id not in world.object_ids:
                continue
            obj = world.object(object_id)
            slots = {f.slot for f in act.fillers if f.entity == object_id}
            history = obj.history
            if act.act_type == ActType.REQUEST:
                history = replace(history, requested=history.requested | slots)
            elif act.act_type == ActType.CONFIRM:
                literal_slots = {f.slot for f in act.fillers if f.entity == object_id and not f.is_relation}
                history = replace(history, confirmed=history.confirmed | literal_slots)
            elif act.act_type == ActType.INFORM:
                named = act.literal(object_id, NAME_SLOT)
                if named is not None and named == obj.context.name:
                    history = replace(history, informed=history.informed | (slots - {NAME_SLOT}))
                    obj = replace(obj, pending_requests=obj.pending_requests - slots, pending_confirms=())
            world.put(replace(obj, history=history))
        if self.relations_enabled:
            for entity, slot, other, other_slot in confirmed_relation_fillers(act):
                rel = world.relation_between(entity, other)
                if rel is not None:
                    name = rel.attribute_between(entity, slot, other, other_slot).name
                    world.put(replace(rel, confirmed=rel.confirmed | {name}))
                    activate_relation(world, rel.id)
        return world

    def focus_state(self, object_id: Optional[str] = None) -> FocusStateResult:
        object_id = object_id or self.world.focus_object
        if object_id is None:
            raise TrackingError("no object in focus")
        return compute_focus_state(self.world, object_id, self.relations_enabled)

