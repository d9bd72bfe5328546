"""Seeded synthetic knowledge base with the Cambridge slot schema."""

import itertools
from collections.abc import Mapping, Sequence
from typing import Optional

import numpy as np
from loguru import logger

from src.config import DEFAULT_ONTOLOGY_PATH

from .models import NAME_SLOT, KnowledgeBase, KnowledgeBaseError, ObjectTypeDef

DEFAULT_SIZES = {"CamRestaurants": 110, "CamHotels": 33}

_PREFIXES = (
    "acorn", "anchor", "ash", "beacon", "birch", "bridge", "castle", "cedar", "chapel", "clover",
    "copper", "crown", "elm", "falcon", "fen", "garden", "golden", "granta", "harbour", "hazel",
    "heron", "ivy", "juniper", "kings", "lantern", "lark", "linden", "maple", "meadow", "mill",
    "oak", "orchard", "otter", "pear tree", "punter", "queens", "river", "rose", "saffron", "silver",
    "swan", "thistle", "willow", "wren",
)
_NOUNS = {
    "placetostay": ("lodge", "guest house", "hotel", "inn", "house", "bed and breakfast", "rooms", "suites"),
    "restaurant": ("kitchen", "bistro", "grill", "cafe", "brasserie", "diner", "table", "eatery", "tavern"),
}
_STREETS = ("mill road", "regent street", "hills road", "chesterton road", "newmarket road", "trumpington street")


def _relation_slots(type_def: ObjectTypeDef) -> list[str]:
    return [slot.name for slot in type_def.informable if slot.concept is not None]


def _extra_value(rng: np.random.Generator, slot: str, type_def: ObjectTypeDef) -> str:
    if slot == "phone":
        return f"01223 {rng.integers(100000, 999999)}"
    if slot == "postcode":
        letters = "".join(rng.choice(list("abdefghjlnpqrstuwxyz"), size=2))
        return f"cb{rng.integers(1, 6)} {rng.integers(1, 10)}{letters}"
    if slot == "address":
        return f"{rng.integers(1, 200)} {rng.choice(_STREETS)}"
    if slot == "price":
        if type_def.type_label == "placetostay":
            single = int(rng.integers(35, 120))
            return f"a cheapest single room is {single} pounds and a cheapest double room is {single + int(rng.integers(20, 60))} pounds"
        return f"main courses from {rng.integers(5, 25)} pounds"
    return f"{slot} {rng.integers(1, 1000)}"


def _unique_name(rng: np.random.Generator, type_def: ObjectTypeDef, taken: set[str]) -> str:
    nouns = _NOUNS.get(type_def.type_label or "", ("place",))
    name = f"{rng.choice(_PREFIXES)} {rng.choice(nouns)}"
    suffix = 2
    candidate = name
    while candidate in taken:
        candidate = f"{name} {suffix}"
        suffix += 1
    taken.add(candidate)
    return candidate


def _generate_records(rng: np.random.Generator, type_def: ObjectTypeDef, size: int) -> list[dict[str, str]]:
    related = _relation_slots(type_def)
    combos = list(itertools.product(*(type_def.values(slot) for slot in related)))
    if size < len(combos):
        raise KnowledgeBaseError(
            f"size {size} for type '{type_def.name}' cannot cover {len(combos)} combinations of {related}"
        )
    order = rng.permutation(len(combos))
    taken: set[str] = set()
    records = []
    for index in range(size):
        row: dict[str, str] = {NAME_SLOT: _unique_name(rng, type_def, taken)}
        fixed = dict(zip(related, combos[order[index]])) if index < len(combos) else {}
        for slot in type_def.informable:
            row[slot.name] = fixed.get(slot.name) or str(rng.choice(slot.values))
        for slot in type_def.requestable:
            if slot not in row:
                row[slot] = _extra_value(rng, slot, type_def)
        records.append(row)
    return records


def generate_kb(
    seed: int,
    sizes: Optional[Mapping[str, int]] = None,
    types: Optional[Sequence[ObjectTypeDef]] = None,
) -> KnowledgeBase:
    """
    Generate a deterministic knowledge base.

    Every combination of concept-tagged slot values (area x pricerange for
    the Cambridge types) gets at least one record per type, so goals with
    related slots are always satisfiable.

    Args:
        seed: Random seed
        sizes: Records per type name (defaults to 110 restaurants, 33 hotels)
        types: Type definitions (defaults to the bundled Cambridge types)

    Returns:
        KnowledgeBase

    Raises:
        KnowledgeBaseError: If a size is not positive or too small to cover the combinations
    """
    if types is None:
        from .loader import load_ontology

        types, _ = load_ontology(DEFAULT_ONTOLOGY_PATH)
    sizes = dict(DEFAULT_SIZES if sizes is None else sizes)
    by_name = {t.name: t for t in types}
    unknown = set(sizes) - set(by_name)
    if unknown:
        raise KnowledgeBaseError(f"sizes given for unknown type(s) {sorted(unknown)}")

    rng = np.random.default_rng(seed)
    records = {}
    for type_def in types:
        size = sizes.get(type_def.name, 0)
        if size <= 0:
            raise KnowledgeBaseError(f"size for type '{type_def.name}' must be positive")
        records[type_def.name] = _generate_records(rng, type_def, size)

    kb = KnowledgeBase(types, records)
    logger.debug(f"Generated {kb!r} with seed {seed}")
    return kb
