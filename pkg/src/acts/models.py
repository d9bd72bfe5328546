"""Semantic dialogue acts, slot fillers and n-best observations."""

from dataclasses import dataclass, field
from src._compat import StrEnum
from typing import NamedTuple, Optional, Union

from src.errors import CedmError
from src.ontology.models import DONTCARE

WORLD = "WORLD"


class ActError(CedmError):
    """Raised when an act violates the act invariants."""
    pass


class ActType(StrEnum):
    HELLO = "hello"
    INFORM = "inform"
    REQUEST = "request"
    CONFIRM = "confirm"
    SELECT = "select"
    REQALTS = "reqalts"
    NEGATE = "negate"
    AFFIRM = "affirm"
    BYE = "bye"


@dataclass(frozen=True)
class Literal:
    value: str

    def __post_init__(self) -> None:
        if self.value == DONTCARE:
            raise ActError("use Dontcare() for the dontcare value")


@dataclass(frozen=True)
class Dontcare:
    pass


@dataclass(frozen=True)
class RelationRef:
    """The value of another entity's slot (``E#slot=E2#slot2``)."""

    entity: str
    slot: str


@dataclass(frozen=True)
class Negated:
    value: str


FillerValue = Union[Literal, Dontcare, RelationRef, Negated]


@dataclass(frozen=True)
class SlotFiller:
    """A qualified slot with an optional value; requests carry no value."""

    entity: str
    slot: str
    value: Optional[FillerValue] = None

    @property
    def is_relation(self) -> bool:
        return isinstance(self.value, RelationRef)

    @property
    def literal(self) -> Optional[str]:
        """Plain value of Literal/Dontcare fillers, else None."""
        if isinstance(self.value, Literal):
            return self.value.value
        if isinstance(self.value, Dontcare):
            return DONTCARE
        return None


_NO_FILLERS = (ActType.HELLO, ActType.BYE)


@dataclass(frozen=True)
class DialogueAct:
    act_type: ActType
    fillers: tuple[SlotFiller, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "act_type", ActType(self.act_type))
        object.__setattr__(self, "fillers", tuple(self.fillers))
        if self.act_type in _NO_FILLERS and self.fillers:
            raise ActError(f"{self.act_type}() carries no slots")
        for filler in self.fillers:
            if self.act_type == ActType.REQUEST and filler.value is not None:
                raise ActError("request() carries slot names without values")
            if self.act_type != ActType.REQUEST and filler.value is None:
                raise ActError(f"{self.act_type}() needs a value for slot {filler.entity}#{filler.slot}")

    @classmethod
    def of(cls, act_type: str | ActType, *fillers: SlotFiller) -> "DialogueAct":
        return cls(ActType(act_type), tuple(fillers))

    def entities(self) -> tuple[str, ...]:
        """Entity ids mentioned anywhere in the act, in order of appearance."""
        seen: list[str] = []
        for filler in self.fillers:
            for entity in (filler.entity, getattr(filler.value, "entity", None)):
                if entity is not None and entity not in seen:
                    seen.append(entity)
        return tuple(seen)

    def fillers_for(self, entity: str) -> tuple[SlotFiller, ...]:
        return tuple(f for f in self.fillers if f.entity == entity)

    def literal(self, entity: str, slot: str) -> Optional[str]:
        for filler in self.fillers:
            if filler.entity == entity and filler.slot == slot and filler.literal is not None:
                return filler.literal
        return None

    @property
    def relation_fillers(self) -> tuple[SlotFiller, ...]:
        return tuple(f for f in self.fillers if f.is_relation)

    def __str__(self) -> str:
        from .grammar import render_act

        return render_act(self)


class Hypothesis(NamedTuple):
    act: DialogueAct
    confidence: float


@dataclass(frozen=True)
class Observation:
    """N-best list of user act hypotheses; leftover mass means "no usable input"."""

    hypotheses: tuple[Hypothesis, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "hypotheses", tuple(Hypothesis(*h) for h in self.hypotheses))
        previous = float("inf")
        total = 0.0
        for hyp in self.hypotheses:
            if hyp.confidence < 0.0 or hyp.confidence > previous + 1e-12:
                raise ActError("confidences must be non-negative and sorted in descending order")
            previous = hyp.confidence
            total += hyp.confidence
        if total > 1.0 + 1e-9:
            raise ActError(f"confidences sum to {total:.6f} > 1")

    @classmethod
    def certain(cls, act: DialogueAct) -> "Observation":
        return cls((Hypothesis(act, 1.0),))

    @classmethod
    def null(cls) -> "Observation":
        return cls(())

    @property
    def top(self) -> Optional[DialogueAct]:
        return self.hypotheses[0].act if self.hypotheses else None

    @property
    def total_confidence(self) -> float:
        return sum(h.confidence for h in self.hypotheses)

    def __len__(self) -> int:
        return len(self.hypotheses)
