"""Object type definitions, relation attributes and the knowledge base."""

from collections.abc import Iterable, Mapping
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.errors import CedmError

DONTCARE = "dontcare"
NONE_VALUE = "**NONE**"
EQUALS = "EQUALS"
NAME_SLOT = "name"
TYPE_SLOT = "type"
NO_VENUE = "none"

RESERVED_VALUES = frozenset({DONTCARE, NONE_VALUE})


class OntologyError(CedmError):
    """Raised when an ontology document violates the schema."""

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class KnowledgeBaseError(CedmError):
    """Raised on invalid knowledge base construction or queries."""
    pass


def _as_text(value: Any) -> Any:
    # YAML reads `stars: 2` as an int; every slot value is text
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int, float)):
        return str(value)
    return value


class SlotDef(BaseModel):
    """One informable slot with its value set and optional concept tag."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str
    values: tuple[str, ...]
    concept: Optional[str] = None

    @field_validator("values", mode="before")
    @classmethod
    def coerce_values(cls, v: Any) -> Any:
        if isinstance(v, (list, tuple)):
            return tuple(_as_text(x) for x in v)
        return v

    @model_validator(mode="after")
    def check_values(self) -> "SlotDef":
        if len(self.values) < 2:
            raise ValueError(f"slot '{self.name}' needs at least 2 values")
        if len(set(self.values)) != len(self.values):
            raise ValueError(f"slot '{self.name}' declares a value twice")
        reserved = RESERVED_VALUES.intersection(self.values)
        if reserved:
            raise ValueError(f"slot '{self.name}' uses reserved value(s) {sorted(reserved)}")
        return self


class ObjectTypeDef(BaseModel):
    """Attribute schema of one object type (e.g. CamHotels)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str
    type_label: Optional[str] = None
    informable: tuple[SlotDef, ...]
    requestable: tuple[str, ...] = Field(default=())

    @model_validator(mode="after")
    def check_schema(self) -> "ObjectTypeDef":
        names = [slot.name for slot in self.informable]
        duplicates = sorted({n for n in names if names.count(n) > 1})
        if duplicates:
            raise ValueError(f"duplicate slot(s) {duplicates} in type '{self.name}'")
        if len(set(self.requestable)) != len(self.requestable):
            raise ValueError(f"duplicate requestable slot in type '{self.name}'")
        missing = [n for n in names if n not in self.requestable]
        if missing:
            raise ValueError(f"informable slot(s) {missing} of type '{self.name}' are not requestable")
        if NAME_SLOT in names or TYPE_SLOT in names:
            raise ValueError(f"'{NAME_SLOT}' and '{TYPE_SLOT}' cannot be informable slots")
        return self

    @property
    def informable_slots(self) -> tuple[str, ...]:
        return tuple(slot.name for slot in self.informable)

    @property
    def requestable_slots(self) -> tuple[str, ...]:
        return self.requestable

    def slot(self, name: str) -> SlotDef:
        for slot in self.informable:
            if slot.name == name:
                return slot
        raise KeyError(name)

    def values(self, slot: str) -> tuple[str, ...]:
        return self.slot(slot).values

    def concept(self, slot: str) -> Optional[str]:
        return self.slot(slot).concept

    def is_informable(self, slot: str) -> bool:
        return slot in self.informable_slots

    def accepts_slot(self, slot: str) -> bool:
        """Whether a dialogue act may mention ``slot`` for this type."""
        return slot in self.requestable or slot in (NAME_SLOT, TYPE_SLOT)


class RelationAttributeDef(BaseModel):
    """A relation attribute such as area2area connecting slots of two types."""

    model_config = ConfigDict(frozen=True)

    name: str
    slot_a: str
    slot_b: str
    relation_values: tuple[str, ...] = (EQUALS,)

    @classmethod
    def between(cls, slot_a: str, slot_b: str) -> "RelationAttributeDef":
        return cls(name=f"{slot_a}2{slot_b}", slot_a=slot_a, slot_b=slot_b)

    def reversed(self) -> "RelationAttributeDef":
        return RelationAttributeDef.between(self.slot_b, self.slot_a)


Record = Mapping[str, str]


class KnowledgeBase:
    """Immutable per-type record lists; validated against the type definitions."""

    def __init__(self, types: Iterable[ObjectTypeDef], records: Mapping[str, Iterable[Mapping[str, str]]]):
        self._types = {t.name: t for t in types}
        self._records: dict[str, tuple[dict[str, str], ...]] = {}
        for type_name, rows in records.items():
            if type_name not in self._types:
                raise KnowledgeBaseError(f"records given for unknown type '{type_name}'")
            self._records[type_name] = tuple(
                self._validated(self._types[type_name], dict(row), index) for index, row in enumerate(rows)
            )
            names = [row[NAME_SLOT] for row in self._records[type_name]]
            if len(set(names)) != len(names):
                raise KnowledgeBaseError(f"record names are not unique for type '{type_name}'")
        for type_name in self._types:
            self._records.setdefault(type_name, ())

    @staticmethod
    def _validated(type_def: ObjectTypeDef, row: dict[str, str], index: int) -> dict[str, str]:
        where = f"records.{type_def.name}[{index}]"
        if NAME_SLOT not in row:
            raise KnowledgeBaseError(f"{where}: record without a name")
        for slot, value in row.items():
            if slot != NAME_SLOT and slot not in type_def.requestable:
                raise KnowledgeBaseError(f"{where}: unknown slot '{slot}'")
            if type_def.is_informable(slot) and value not in type_def.values(slot):
                raise KnowledgeBaseError(f"{where}: value '{value}' is not declared for slot '{slot}'")
        missing = [s for s in type_def.informable_slots if s not in row]
        if missing:
            raise KnowledgeBaseError(f"{where}: missing informable slot(s) {missing}")
        return row

    @property
    def types(self) -> dict[str, ObjectTypeDef]:
        return dict(self._types)

    def type_def(self, type_name: str) -> ObjectTypeDef:
        try:
            return self._types[type_name]
        except KeyError:
            raise KnowledgeBaseError(f"unknown type '{type_name}'") from None

    def records(self, type_name: str) -> tuple[dict[str, str], ...]:
        self.type_def(type_name)
        return self._records[type_name]

    def record_by_name(self, type_name: str, name: str) -> Optional[dict[str, str]]:
        for row in self.records(type_name):
            if row[NAME_SLOT] == name:
                return row
        return None

    def query(
        self,
        type_name: str,
        constraints: Mapping[str, str],
        exclude_names: Iterable[str] = (),
    ) -> list[dict[str, str]]:
        """Return exactly the records satisfying every constraint; DONTCARE matches anything."""
        type_def = self.type_def(type_name)
        for slot in constraints:
            if not type_def.is_informable(slot):
                raise KnowledgeBaseError(f"unknown slot '{slot}' for type '{type_name}'")
        excluded = set(exclude_names)
        active = {slot: value for slot, value in constraints.items() if value != DONTCARE}
        return [
            row
            for row in self._records[type_name]
            if row[NAME_SLOT] not in excluded and all(row[slot] == value for slot, value in active.items())
        ]

    def __len__(self) -> int:
        return sum(len(rows) for rows in self._records.values())

    def __repr__(self) -> str:
        sizes = ", ".join(f"{name}={len(rows)}" for name, rows in self._records.items())
        return f"KnowledgeBase({sizes})"


def query_kb(kb: KnowledgeBase, type_name: str, constraints: Mapping[str, str]) -> list[dict[str, str]]:
    """Records of ``type_name`` matching ``constraints``."""
    return kb.query(type_name, constraints)
