"""
Semantic error model: turns the user's true act into a scored n-best list.

With probability ``ser`` the top hypothesis is a confusion of the true act;
the true act then moves to a random lower rank (and is lost for n-best 1).
Confusions substitute a value, confuse the act type or delete a slot.
"""

from collections.abc import Callable
from dataclasses import replace
from typing import Literal as TypingLiteral, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.acts.models import (
    ActType,
    DialogueAct,
    Dontcare,
    Hypothesis,
    Literal,
    Negated,
    Observation,
    RelationRef,
    SlotFiller,
)
from src.acts.addressing import WorldDescription
from src.ontology.models import DONTCARE

EnvironmentName = TypingLiteral["env1", "env3"]

Resolver = Callable[[SlotFiller], Optional[str]]

_VALUED_TYPES = (ActType.INFORM, ActType.NEGATE, ActType.CONFIRM, ActType.REQALTS)
_CONTENT_FREE_TYPES = (ActType.AFFIRM, ActType.NEGATE, ActType.REQALTS)


class ErrorModelConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    ser: float = Field(default=0.0, ge=0.0, le=1.0)
    nbest: int = Field(default=1, ge=1)
    substitution: float = Field(default=0.7, ge=0.0)
    act_confusion: float = Field(default=0.15, ge=0.0)
    deletion: float = Field(default=0.15, ge=0.0)
    relation_literal: float = Field(default=0.5, ge=0.0, le=1.0)
    top_alpha: float = Field(default=4.0, gt=0.0)
    null_alpha: float = Field(default=0.5, gt=0.0)
    max_attempts: int = Field(default=20, ge=1)

    @model_validator(mode="after")
    def check_weights(self) -> "ErrorModelConfig":
        if self.substitution + self.act_confusion + self.deletion <= 0.0:
            raise ValueError("at least one confusion weight must be positive")
        return self

    @property
    def confusion_weights(self) -> np.ndarray:
        weights = np.array([self.substitution, self.act_confusion, self.deletion])
        return weights / weights.sum()


ENVIRONMENTS: dict[str, ErrorModelConfig] = {
    "env1": ErrorModelConfig(ser=0.0, nbest=1),
    "env3": ErrorModelConfig(ser=0.15, nbest=3),
}


def _pick(rng: np.random.Generator, items: list):
    return items[int(rng.integers(len(items)))]


def _substitute(
    rng: np.random.Generator, act: DialogueAct, world: WorldDescription, resolve: Optional[Resolver], config
) -> Optional[DialogueAct]:
    if act.act_type == ActType.REQUEST:
        index = int(rng.integers(len(act.fillers)))
        filler = act.fillers[index]
        type_def = world.object_type(filler.entity)
        taken = {f.slot for f in act.fillers if f.entity == filler.entity}
        options = [s for s in type_def.requestable_slots if s not in taken]
        if not options:
            return None
        fillers = list(act.fillers)
        fillers[index] = replace(filler, slot=_pick(rng, options))
        return DialogueAct(act.act_type, tuple(fillers))

    candidates = [i for i, f in enumerate(act.fillers) if world.object_type(f.entity).is_informable(f.slot)]
    if not candidates:
        return None
    index = _pick(rng, candidates)
    filler = act.fillers[index]
    values = world.object_type(filler.entity).values(filler.slot)
    value = filler.value
    if isinstance(value, RelationRef):
        resolved = resolve(filler) if resolve is not None else None
        if resolved is not None and resolved != DONTCARE and rng.random() < config.relation_literal:
            new_value = Literal(resolved)
        else:
            new_value = _literal_or_dontcare(_pick(rng, list(values) + [DONTCARE]))
    elif isinstance(value, Negated):
        new_value = Negated(_pick(rng, [v for v in values if v != value.value]))
    else:
        current = filler.literal
        new_value = _literal_or_dontcare(_pick(rng, [v for v in list(values) + [DONTCARE] if v != current]))
    fillers = list(act.fillers)
    fillers[index] = replace(filler, value=new_value)
    return DialogueAct(act.act_type, tuple(fillers))


def _literal_or_dontcare(value: str):
    return Dontcare() if value == DONTCARE else Literal(value)


def _confuse_type(rng: np.random.Generator, act: DialogueAct) -> Optional[DialogueAct]:
    if act.act_type in (ActType.HELLO, ActType.BYE, ActType.REQUEST):
        return None
    if not act.fillers:
        pool = _CONTENT_FREE_TYPES
    elif any(isinstance(f.value, Negated) for f in act.fillers):
        return None
    else:
        pool = _VALUED_TYPES
    options = [t for t in pool if t != act.act_type]
    return DialogueAct(_pick(rng, options), act.fillers)


def _delete(rng: np.random.Generator, act: DialogueAct) -> Optional[DialogueAct]:
    if len(act.fillers) < 2:
        return None
    index = int(rng.integers(len(act.fillers)))
    return DialogueAct(act.act_type, act.fillers[:index] + act.fillers[index + 1:])


def confuse(
    rng: np.random.Generator,
    act: DialogueAct,
    config: ErrorModelConfig,
    world: WorldDescription,
    resolve: Optional[Resolver] = None,
) -> Optional[DialogueAct]:
    """One random confusion of ``act``; None when no confusion type applies."""
    kinds = ("substitution", "act_confusion", "deletion")
    first = int(rng.choice(3, p=config.confusion_weights))
    for offset in range(3):
        kind = kinds[(first + offset) % 3]
        if kind == "substitution":
            confused = _substitute(rng, act, world, resolve, config) if act.fillers else None
        elif kind == "act_confusion":
            confused = _confuse_type(rng, act)
        else:
            confused = _delete(rng, act)
        if confused is not None and confused != act:
            return confused
    return None


def _distinct_confusion(rng, act, config, world, resolve, taken: list[DialogueAct]) -> Optional[DialogueAct]:
    for _ in range(config.max_attempts):
        confused = confuse(rng, act, config, world, resolve)
        if confused is None:
            return None
        if confused not in taken:
            return confused
    return None


def _confidences(rng: np.random.Generator, count: int, config: ErrorModelConfig) -> list[float]:
    if count == 1 and config.nbest == 1:
        return [1.0]
    alphas = [config.top_alpha] + [1.0] * (count - 1) + [config.null_alpha]
    draws = rng.dirichlet(alphas)
    return sorted((float(p) for p in draws[:count]), reverse=True)


def apply_error_model(
    rng: np.random.Generator,
    act: DialogueAct,
    config: ErrorModelConfig,
    world: WorldDescription,
    resolve: Optional[Resolver] = None,
) -> Observation:
    """
    Corrupt ``act`` into an n-best observation.

    Args:
        rng: Dialogue random stream
        act: True user act
        config: Error rate, n-best length and confusion weights
        world: Supplies slot value sets for substitutions
        resolve: Maps a relation-valued filler to the literal value it stands for

    Returns:
        Observation with at most ``config.nbest`` distinct hypotheses
    """
    if config.ser == 0.0 and config.nbest == 1:
        return Observation.certain(act)

    wrong_top = rng.random() < config.ser
    ranked: list[DialogueAct] = []
    if wrong_top:
        top = _distinct_confusion(rng, act, config, world, resolve, [act])
        if top is None:
            wrong_top = False
        else:
            ranked.append(top)
    if not wrong_top:
        ranked.append(act)
    slots_left = config.nbest - len(ranked)
    true_rank = int(rng.integers(1, config.nbest)) if wrong_top and config.nbest > 1 else None
    while slots_left > 0:
        if true_rank is not None and len(ranked) == true_rank:
            ranked.append(act)
        else:
            confused = _distinct_confusion(rng, act, config, world, resolve, ranked + [act])
            if confused is None:
                if true_rank is not None and act not in ranked:
                    ranked.append(act)
                break
            ranked.append(confused)
        slots_left -= 1

    confidences = _confidences(rng, len(ranked), config)
    return Observation(tuple(Hypothesis(a, c) for a, c in zip(ranked, confidences)))
