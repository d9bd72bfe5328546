"""Focus-state merging of an object belief with relation-weighted beliefs.

For slot ``s`` of the focus object ``o`` and each relation to another
object ``o'`` that connects ``s`` to a slot ``s'`` of ``o'``::

    b~(v)    = rel(EQUALS) * b'(v)                     v != NONE
    b~(NONE) = rel(EQUALS) * b'(NONE) + rel(NONE)

where ``b'`` is the belief of ``o'`` over ``s'``, replaced by a point mass
at the offered value once ``o'`` has an offer. The focus state is then the
weighted average of the object's own belief and every ``b~`` with weights
``w = 1 - b(NONE)``.
"""

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from src.entities.marginal import TOLERANCE, Marginal
from src.entities.models import ConversationalWorld
from src.ontology.models import DONTCARE, EQUALS, NONE_VALUE

from .rules import TrackingError

CONFLICT_THRESHOLD = 0.5
OWN = "self"


@dataclass(frozen=True)
class RelationContribution:
    """Relation-weighted beliefs one relation contributes, keyed by the focus object's slot."""

    source: str
    beliefs: Mapping[str, Marginal]


@dataclass(frozen=True)
class FocusStateResult:
    object_id: str
    merged: Mapping[str, Marginal]
    conflicts: Mapping[str, bool]
    contributing_weights: Mapping[str, Mapping[str, float]] = field(default_factory=dict)

    @property
    def conflict(self) -> bool:
        return any(self.conflicts.values())

    def top_value(self, slot: str) -> Optional[str]:
        """Argmax over the merged marginal if it is a real value (not NONE, not DONTCARE)."""
        value = self.merged[slot].argmax()
        return None if value in (NONE_VALUE, DONTCARE) else value


def _check_normalised(marginal: Marginal, what: str) -> None:
    if abs(marginal.total - 1.0) > TOLERANCE:
        raise TrackingError(f"{what} is not normalised (sum {marginal.total!r})")


def weighted_relation_belief(
    rel_marginal: Marginal,
    other_belief: Marginal,
    other_context: Optional[str] = None,
) -> Marginal:
    """
    Relation-weighted belief of the other object (``b~``) over its own domain.

    Args:
        rel_marginal: Relation attribute belief over {NONE, EQUALS}
        other_belief: The other object's belief over the connected slot
        other_context: The other object's offered value for that slot, if any

    Raises:
        TrackingError: On unnormalised inputs or a context value outside the domain
    """
    _check_normalised(rel_marginal, "relation belief")
    _check_normalised(other_belief, "related object belief")
    if other_context is not None:
        if other_context not in other_belief or other_context == NONE_VALUE:
            raise TrackingError(f"context value '{other_context}' is outside the domain")
        other_belief = Marginal.point(other_belief.domain, other_context)
    equals = rel_marginal.get(EQUALS)
    probs = equals * other_belief.probs
    probs[other_belief.index(NONE_VALUE)] += rel_marginal[NONE_VALUE]
    return other_belief.with_probs(probs)


def _align(marginal: Marginal, domain: tuple[str, ...]) -> np.ndarray:
    if marginal.domain == domain:
        return marginal.probs
    missing = set(marginal.domain) - set(domain)
    if missing:
        raise TrackingError(f"values {sorted(missing)} cannot be merged into domain {domain}")
    return np.array([marginal.get(value) for value in domain])


def _top_real(marginal: Marginal) -> Optional[tuple[str, float]]:
    return marginal.top(exclude=(NONE_VALUE, DONTCARE))


def merge_slot(
    own: Marginal, others: Sequence[tuple[str, Marginal]], threshold: float = CONFLICT_THRESHOLD
) -> tuple[Marginal, bool, dict[str, float]]:
    """Merge one slot; returns the merged marginal, the conflict bit and the weights."""
    _check_normalised(own, "object belief")
    domain = own.domain
    weights = {OWN: 1.0 - own.none}
    numerator = weights[OWN] * own.probs
    for source, belief in others:
        _check_normalised(belief, f"contribution '{source}'")
        weight = 1.0 - belief.get(NONE_VALUE)
        weights[source] = weight
        numerator = numerator + weight * _align(belief, domain)
    total = sum(weights.values())
    if total <= TOLERANCE:
        merged = Marginal.fresh(domain)
    elif all(weight == 0.0 for source, weight in weights.items() if source != OWN):
        merged = own
    else:
        probs = numerator / total
        merged = own.with_probs(probs / probs.sum())

    conflict = False
    own_top = _top_real(own)
    if own_top is not None and own_top[1] > threshold:
        for _, belief in others:
            other_top = _top_real(belief)
            if other_top is not None and other_top[1] > threshold and other_top[0] != own_top[0]:
                conflict = True
                break
    return merged, conflict, weights


def merge_focus_state(
    object_belief: Mapping[str, Marginal],
    contributions: Sequence[RelationContribution],
    object_id: str = "",
    threshold: float = CONFLICT_THRESHOLD,
) -> FocusStateResult:
    """
    Merge the focus object's belief with relation contributions, slot by slot.

    Slots no contribution covers keep the object's belief and never conflict.
    """
    merged: dict[str, Marginal] = {}
    conflicts: dict[str, bool] = {}
    weights: dict[str, Mapping[str, float]] = {}
    for slot, own in object_belief.items():
        others = [(c.source, c.beliefs[slot]) for c in contributions if slot in c.beliefs]
        merged[slot], conflicts[slot], weights[slot] = merge_slot(own, others, threshold)
    return FocusStateResult(object_id=object_id, merged=merged, conflicts=conflicts, contributing_weights=weights)


def relation_contributions(world: ConversationalWorld, object_id: str) -> list[RelationContribution]:
    """``b~`` for every relation touching ``object_id``; all-NONE relations contribute weight 0."""
    contributions = []
    for rel in world.relations_of(object_id):
        other = world.object(rel.other(object_id))
        beliefs = {}
        for attr in rel.attributes:
            slot = rel.slot_of(attr, object_id)
            other_slot = rel.slot_of(attr, other.id)
            beliefs[slot] = weighted_relation_belief(
                rel.user_goal[attr.name], other.belief(other_slot), other.context.value(other_slot)
            )
        contributions.append(RelationContribution(source=rel.id, beliefs=beliefs))
    return contributions


def compute_focus_state(
    world: ConversationalWorld, object_id: str, relations_enabled: bool = True
) -> FocusStateResult:
    """Focus state of ``object_id``; without relations it is the object's own belief."""
    obj = world.object(object_id)
    contributions = relation_contributions(world, object_id) if relations_enabled else []
    return merge_focus_state(obj.user_goal, contributions, object_id=object_id)
