"""Fixed-length summary vectors fed to the learners."""

from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from src.entities.models import NOT_EQUALS, ConversationalWorld
from src.ontology.models import DONTCARE, EQUALS, NONE_VALUE, KnowledgeBase
from src.tracking.merging import FocusStateResult

from .errors import PolicyError

MATCH_BUCKETS = ("0", "1", "2-4", "5+")


@dataclass(frozen=True)
class BeliefSummary:
    names: tuple[str, ...]
    vector: np.ndarray

    def __post_init__(self) -> None:
        vector = np.asarray(self.vector, dtype=float)
        if vector.shape != (len(self.names),):
            raise PolicyError(f"{len(self.names)} feature names for a vector of shape {vector.shape}")
        vector.setflags(write=False)
        object.__setattr__(self, "vector", vector)

    def __len__(self) -> int:
        return len(self.names)

    def __getitem__(self, name: str) -> float:
        return float(self.vector[self.names.index(name)])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BeliefSummary):
            return NotImplemented
        return self.names == other.names and np.array_equal(self.vector, other.vector)

    def __hash__(self) -> int:
        return hash((self.names, self.vector.tobytes()))

    def as_dict(self) -> dict[str, float]:
        return {name: float(v) for name, v in zip(self.names, self.vector)}


def match_bucket(count: int) -> int:
    if count <= 1:
        return count
    return 2 if count <= 4 else 3


def focus_constraints(focus_state: FocusStateResult) -> dict[str, str]:
    """Slots whose merged argmax is a real value; DONTCARE and NONE constrain nothing."""
    constraints = {}
    for slot in focus_state.merged:
        value = focus_state.top_value(slot)
        if value is not None:
            constraints[slot] = value
    return constraints


def offer_matches(offer: Mapping[str, str], constraints: Mapping[str, str]) -> bool:
    return all(offer.get(slot) == value for slot, value in constraints.items() if value != DONTCARE)


def _object_features(
    world: ConversationalWorld, object_id: str, focus_state: FocusStateResult, kb: KnowledgeBase
) -> list[tuple[str, float]]:
    obj = world.object(object_id)
    features: list[tuple[str, float]] = [("bias", 1.0)]
    history = obj.history
    for slot, marginal in focus_state.merged.items():
        ranked = marginal.ranked()
        features += [
            (f"{slot}.top", ranked[0][1] if ranked else 0.0),
            (f"{slot}.second", ranked[1][1] if len(ranked) > 1 else 0.0),
            (f"{slot}.none", marginal[NONE_VALUE]),
            (f"{slot}.dontcare", marginal.get(DONTCARE)),
            (f"{slot}.conflict", float(focus_state.conflicts.get(slot, False))),
            (f"{slot}.requested", float(slot in history.requested)),
            (f"{slot}.confirmed", float(slot in history.confirmed)),
            (f"{slot}.offered", float(slot in history.offered)),
        ]
    constraints = focus_constraints(focus_state)
    matches = kb.query(obj.type_name, constraints)
    bucket = match_bucket(len(matches))
    features += [(f"matches.{label}", float(i == bucket)) for i, label in enumerate(MATCH_BUCKETS)]
    has_offer = not obj.context.is_empty
    alternatives = kb.query(obj.type_name, constraints, exclude_names=obj.offered_names) if has_offer else matches
    features += [
        ("offer.exists", float(has_offer)),
        ("offer.matches", float(has_offer and offer_matches(obj.context.offered, constraints))),
        ("offer.alternatives", float(bool(alternatives))),
        ("user.pending_request", float(bool(obj.pending_requests))),
        ("user.pending_confirm", float(bool(obj.pending_confirms))),
        ("user.reqalts", float(obj.alternatives_requested)),
        ("user.negated", float(obj.user_negated)),
        ("conflict", float(focus_state.conflict)),
    ]
    return features


def _relation_features(world: ConversationalWorld, relation_id: str) -> list[tuple[str, float]]:
    rel = world.relation(relation_id)
    features: list[tuple[str, float]] = [(f"{rel.id}.active", float(rel.active))]
    for attr in rel.attributes:
        marginal = rel.user_goal[attr.name]
        context = rel.context.value(attr.name)
        prefix = f"{rel.id}.{attr.name}"
        features += [
            (f"{prefix}.equals", marginal[EQUALS]),
            (f"{prefix}.none", marginal[NONE_VALUE]),
            (f"{prefix}.context_equals", float(context == EQUALS)),
            (f"{prefix}.context_not_equals", float(context == NOT_EQUALS)),
            (f"{prefix}.confirmed", float(attr.name in rel.confirmed)),
        ]
    return features


def _build(features: list[tuple[str, float]]) -> BeliefSummary:
    return BeliefSummary(tuple(name for name, _ in features), np.array([value for _, value in features]))


def _check_focus(world: ConversationalWorld, focus_object: str, focus_state: FocusStateResult) -> None:
    if not focus_object:
        raise PolicyError("cannot summarise an empty focus")
    world.object(focus_object)
    if focus_state.object_id and focus_state.object_id != focus_object:
        raise PolicyError(f"focus state belongs to '{focus_state.object_id}', not '{focus_object}'")


def summarize(
    world: ConversationalWorld, focus_object: str, focus_state: FocusStateResult, kb: KnowledgeBase
) -> BeliefSummary:
    """
    Object sub-policy summary: per slot of the focus state the top, second,
    NONE and DONTCARE probabilities, the conflict bit and history flags,
    then a KB match-count bucket and offer/user-act flags.
    """
    _check_focus(world, focus_object, focus_state)
    return _build(_object_features(world, focus_object, focus_state, kb))


def summarize_master(
    world: ConversationalWorld, focus_object: str, focus_state: FocusStateResult, kb: KnowledgeBase
) -> BeliefSummary:
    """Object summary followed by the beliefs and flags of every relation touching the object."""
    _check_focus(world, focus_object, focus_state)
    features = _object_features(world, focus_object, focus_state, kb)
    for rel in world.relations_of(focus_object):
        features += _relation_features(world, rel.id)
    return _build(features)


def summarize_relation(
    world: ConversationalWorld, relation_id: str, focus_object: str, focus_state: FocusStateResult
) -> BeliefSummary:
    """Relation sub-policy summary: relation beliefs plus the focus object's view of the connected slots."""
    _check_focus(world, focus_object, focus_state)
    rel = world.relation(relation_id)
    obj = world.object(focus_object)
    features: list[tuple[str, float]] = [("bias", 1.0)] + _relation_features(world, relation_id)
    for attr in rel.attributes:
        slot = rel.slot_of(attr, focus_object)
        own = obj.belief(slot).top()
        merged = focus_state.merged[slot].top()
        features += [
            (f"{slot}.own_top", own[1] if own else 0.0),
            (f"{slot}.merged_top", merged[1] if merged else 0.0),
            (f"{slot}.conflict", float(focus_state.conflicts.get(slot, False))),
        ]
    features.append(("user.negated", float(obj.user_negated)))
    return _build(features)
