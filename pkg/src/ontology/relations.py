"""Relation attributes derived from object type definitions."""

from .models import ObjectTypeDef, RelationAttributeDef


def derive_relations(type_a: ObjectTypeDef, type_b: ObjectTypeDef) -> list[RelationAttributeDef]:
    """
    Derive relation attributes between two object types.

    Only slots carrying the same concept tag are connected; the attribute
    name is ``<slot_a>2<slot_b>``.

    Args:
        type_a: First endpoint type
        type_b: Second endpoint type (may be ``type_a`` itself)

    Returns:
        Relation attributes sorted by name (empty if no concept is shared)
    """
    attributes = [
        RelationAttributeDef.between(slot_a.name, slot_b.name)
        for slot_a in type_a.informable
        for slot_b in type_b.informable
        if slot_a.concept is not None and slot_a.concept == slot_b.concept
    ]
    return sorted(attributes, key=lambda attr: attr.name)
