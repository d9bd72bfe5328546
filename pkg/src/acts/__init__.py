"""Semantic dialogue acts, the act grammar and n-best observations."""

from .addressing import UnknownEntityError, WorldDescription, addressed_entity_of, focus_object_of, validate_act
from .grammar import ActSyntaxError, parse_act, render_act, render_filler
from .models import (
    WORLD,
    ActError,
    ActType,
    DialogueAct,
    Dontcare,
    FillerValue,
    Hypothesis,
    Literal,
    Negated,
    Observation,
    RelationRef,
    SlotFiller,
)

__all__ = [
    "WORLD",
    "ActError",
    "ActSyntaxError",
    "ActType",
    "DialogueAct",
    "Dontcare",
    "FillerValue",
    "Hypothesis",
    "Literal",
    "Negated",
    "Observation",
    "RelationRef",
    "SlotFiller",
    "UnknownEntityError",
    "WorldDescription",
    "addressed_entity_of",
    "focus_object_of",
    "parse_act",
    "render_act",
    "render_filler",
    "validate_act",
]
