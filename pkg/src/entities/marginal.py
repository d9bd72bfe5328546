"""Marginal belief over one attribute."""

from collections.abc import Iterable, Mapping, Sequence
from typing import Optional

import numpy as np

from src.errors import CedmError
from src.ontology.models import DONTCARE, EQUALS, NONE_VALUE

TOLERANCE = 1e-9


class BeliefError(CedmError, ValueError):
    """Raised when a marginal is not a probability distribution."""
    pass


class Marginal:
    """
    Probability distribution over a fixed value domain that contains NONE.

    The probabilities are stored in a read-only numpy vector aligned with
    ``domain``; every operation returns a new marginal.
    """

    __slots__ = ("_domain", "_index", "_probs")

    def __init__(self, domain: Sequence[str], probs: Iterable[float], *, check: bool = True):
        self._domain = tuple(domain)
        self._index = {value: i for i, value in enumerate(self._domain)}
        vector = np.array(list(probs), dtype=float)
        if check:
            if NONE_VALUE not in self._index:
                raise BeliefError(f"domain {self._domain} lacks {NONE_VALUE}")
            if len(self._index) != len(self._domain):
                raise BeliefError(f"domain {self._domain} repeats a value")
            if vector.shape != (len(self._domain),):
                raise BeliefError(f"{vector.shape[0] if vector.ndim else 0} probabilities for {len(self._domain)} values")
            if np.any(vector < -TOLERANCE):
                raise BeliefError(f"negative probability in {vector}")
            total = float(vector.sum())
            if abs(total - 1.0) > TOLERANCE:
                raise BeliefError(f"probabilities sum to {total!r}")
            vector = np.clip(vector, 0.0, None)
        vector.setflags(write=False)
        self._probs = vector

    @classmethod
    def fresh(cls, domain: Sequence[str]) -> "Marginal":
        """All mass on NONE: nothing shared yet."""
        domain = tuple(domain)
        probs = [1.0 if value == NONE_VALUE else 0.0 for value in domain]
        return cls(domain, probs)

    @classmethod
    def from_mapping(cls, domain: Sequence[str], mapping: Mapping[str, float]) -> "Marginal":
        domain = tuple(domain)
        unknown = set(mapping) - set(domain)
        if unknown:
            raise BeliefError(f"values {sorted(unknown)} are outside the domain")
        return cls(domain, [mapping.get(value, 0.0) for value in domain])

    @classmethod
    def point(cls, domain: Sequence[str], value: str) -> "Marginal":
        return cls.from_mapping(domain, {value: 1.0})

    @property
    def domain(self) -> tuple[str, ...]:
        return self._domain

    @property
    def probs(self) -> np.ndarray:
        return self._probs

    def with_probs(self, probs: Iterable[float]) -> "Marginal":
        return Marginal(self._domain, probs)

    def __contains__(self, value: str) -> bool:
        return value in self._index

    def __getitem__(self, value: str) -> float:
        try:
            return float(self._probs[self._index[value]])
        except KeyError:
            raise BeliefError(f"value '{value}' is outside the domain") from None

    def get(self, value: str, default: float = 0.0) -> float:
        index = self._index.get(value)
        return default if index is None else float(self._probs[index])

    def index(self, value: str) -> int:
        try:
            return self._index[value]
        except KeyError:
            raise BeliefError(f"value '{value}' is outside the domain") from None

    def items(self) -> list[tuple[str, float]]:
        return [(value, float(p)) for value, p in zip(self._domain, self._probs)]

    def as_dict(self) -> dict[str, float]:
        return dict(self.items())

    @property
    def total(self) -> float:
        return float(self._probs.sum())

    @property
    def none(self) -> float:
        return self[NONE_VALUE]

    def ranked(self, exclude: Iterable[str] = (NONE_VALUE, DONTCARE)) -> list[tuple[str, float]]:
        """Values by descending probability; ties keep domain order."""
        skip = set(exclude)
        candidates = [(value, p) for value, p in self.items() if value not in skip]
        return sorted(candidates, key=lambda item: -item[1])

    def top(self, exclude: Iterable[str] = (NONE_VALUE, DONTCARE)) -> Optional[tuple[str, float]]:
        ranked = self.ranked(exclude)
        return ranked[0] if ranked else None

    def argmax(self) -> str:
        """Most probable value over the whole domain, NONE included."""
        return self._domain[int(np.argmax(self._probs))]

    def is_fresh(self) -> bool:
        return self.none >= 1.0 - TOLERANCE

    def format(self, places: int = 4) -> str:
        """Non-zero entries as ``value:0.1234`` in domain order."""
        parts = [f"{value}:{p:.{places}f}" for value, p in self.items() if p > 0.0]
        return " ".join(parts) if parts else "-"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Marginal):
            return NotImplemented
        return self._domain == other._domain and np.array_equal(self._probs, other._probs)

    def __hash__(self) -> int:
        return hash((self._domain, self._probs.tobytes()))

    def __repr__(self) -> str:
        return f"Marginal({self.format()})"


def slot_domain(values: Sequence[str]) -> tuple[str, ...]:
    """Domain of an object slot: NONE, the declared values, DONTCARE."""
    return (NONE_VALUE, *values, DONTCARE)


RELATION_DOMAIN = (NONE_VALUE, EQUALS)
