"""Rule-based belief tracking and focus-state merging."""

from .merging import (
    CONFLICT_THRESHOLD,
    FocusStateResult,
    RelationContribution,
    compute_focus_state,
    merge_focus_state,
    merge_slot,
    relation_contributions,
    weighted_relation_belief,
)
from .rules import TrackingError, apply_rejection_discount, focus_rule_update
from .trackers import (
    DialogueStateTracker,
    asserted_literals,
    confirmed_relation_fillers,
    track_entity,
    track_object,
    track_relation,
    track_world,
)

__all__ = [
    "CONFLICT_THRESHOLD",
    "DialogueStateTracker",
    "FocusStateResult",
    "RelationContribution",
    "TrackingError",
    "apply_rejection_discount",
    "asserted_literals",
    "compute_focus_state",
    "confirmed_relation_fillers",
    "focus_rule_update",
    "merge_focus_state",
    "merge_slot",
    "relation_contributions",
    "track_entity",
    "track_object",
    "track_relation",
    "track_world",
    "weighted_relation_belief",
]
