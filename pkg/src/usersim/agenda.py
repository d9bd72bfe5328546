"""Agenda-based simulated user talking about one object after the other."""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from src.acts.models import ActType, DialogueAct, Dontcare, Literal, RelationRef, SlotFiller
from src.entities.models import ConversationalWorld
from src.ontology.models import DONTCARE, NAME_SLOT, NO_VENUE, TYPE_SLOT, KnowledgeBase

from .goal import UserGoal


class UserConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    patience: int = Field(default=5, ge=1)
    goal_change: float = Field(default=0.05, ge=0.0, le=1.0)
    reqalts: float = Field(default=0.3, ge=0.0, le=1.0)
    reqalts_goal_change: float = Field(default=1.0, ge=0.0, le=1.0)
    dontcare: float = Field(default=0.1, ge=0.0, le=1.0)
    max_requests: int = Field(default=2, ge=0)


@dataclass
class ObjectAgenda:
    """What the user still has to say about one object."""

    object_id: str
    stack: list[str] = field(default_factory=list)
    started: bool = False
    done: bool = False
    accepted: Optional[str] = None
    received: set[str] = field(default_factory=set)
    reqalts_used: bool = False
    awaiting_alternatives: bool = False
    given: set[str] = field(default_factory=set)
    corrected: set[str] = field(default_factory=set)

    def push(self, slot: str) -> None:
        if slot not in self.stack:
            self.stack.append(slot)

    def pop(self) -> Optional[str]:
        return self.stack.pop() if self.stack else None

    def drop(self, slot: str) -> None:
        if slot in self.stack:
            self.stack.remove(slot)


class UserSimulator:
    """
    One simulated user for one dialogue.

    The user opens each object with an inform of its type and some
    constraints, answers requests and confirms, corrects offers violating
    the goal, requests the goal's extra slots for an acceptable offer and
    then moves on to the next object. Values of related slots are uttered
    as references to an earlier discussed object with probability
    ``relation_probability``.

    Patience counts consecutive unhelpful system turns: a repeat of the
    previous act, a hello, a request for slots the user already gave or an
    offer breaking a constraint the user already corrected. Confirms leave
    the count alone and any other act resets it.
    """

    def __init__(
        self,
        goal: UserGoal,
        world: ConversationalWorld,
        kb: KnowledgeBase,
        rng: np.random.Generator,
        relation_probability: float = 0.0,
        config: Optional[UserConfig] = None,
    ):
        self.goal = goal
        self.world = world
        self.kb = kb
        self.rng = rng
        self.relation_probability = relation_probability
        self.config = config or UserConfig()
        self.agendas = {object_id: ObjectAgenda(object_id) for object_id in goal.order}
        self.discussed: list[str] = []
        self.finished = False
        self._index = 0
        self._last_system: Optional[DialogueAct] = None
        self._stalled = 0

    @property
    def current(self) -> Optional[str]:
        return self.goal.order[self._index] if self._index < len(self.goal.order) else None

    @property
    def patience_left(self) -> int:
        return max(self.config.patience - self._stalled, 0)

    # value rendering

    def _value_filler(self, object_id: str, slot: str, correction: bool = False) -> SlotFiller:
        value = self.goal.object_goal(object_id).constraints[slot]
        self.agendas[object_id].given.add(slot)
        if value != DONTCARE:
            for related in self.goal.related_slots(self.world, object_id, slot):
                if related.other_object not in self.discussed or related.other_object == object_id:
                    continue
                if correction and not self.goal.is_valid(self.world, object_id, related):
                    continue
                if self.rng.random() < self.relation_probability:
                    return SlotFiller(object_id, slot, RelationRef(related.other_object, related.other_slot))
                break
        return SlotFiller(object_id, slot, Dontcare() if value == DONTCARE else Literal(value))

    def resolve(self, filler: SlotFiller) -> Optional[str]:
        """Literal value a relation-valued filler stands for in the user's goal."""
        goal = self.goal.objects.get(filler.entity)
        return None if goal is None else goal.constraints.get(filler.slot)

    # agenda steps

    def _hang_up(self) -> DialogueAct:
        self.finished = True
        return DialogueAct(ActType.BYE)

    def _open_object(self, object_id: str) -> DialogueAct:
        agenda = self.agendas[object_id]
        agenda.started = True
        type_def = self.world.object(object_id).type_def
        slots = type_def.informable_slots
        order = self.rng.permutation(len(slots))
        k = int(self.rng.integers(1, len(slots) + 1))
        opening = {slots[i] for i in order[:k]}
        for i in reversed(order[k:]):
            agenda.push(slots[i])
        fillers = []
        if type_def.type_label:
            fillers.append(SlotFiller(object_id, TYPE_SLOT, Literal(type_def.type_label)))
        fillers += [self._value_filler(object_id, slot) for slot in slots if slot in opening]
        if object_id not in self.discussed:
            self.discussed.append(object_id)
        logger.trace(f"User opens {object_id} with {sorted(opening)}")
        return DialogueAct(ActType.INFORM, tuple(fillers))

    def _reinform(self, object_id: str) -> DialogueAct:
        agenda = self.agendas[object_id]
        slot = agenda.pop()
        if slot is None:
            slots = self.world.object(object_id).type_def.informable_slots
            slot = slots[int(self.rng.integers(len(slots)))]
        return DialogueAct(ActType.INFORM, (self._value_filler(object_id, slot),))

    def _finish_object(self, object_id: str) -> DialogueAct:
        self.agendas[object_id].done = True
        self._index += 1
        following = self.current
        if following is None:
            return self._hang_up()
        return self._open_object(following)

    def skip_object(self) -> None:
        """Give up on the current object (turn cap reached)."""
        current = self.current
        if current is None:
            return
        logger.debug(f"User gives up on {current}")
        self.agendas[current].done = True
        self._index += 1
        if self.current is None:
            self.finished = True

    def _change_goal(self, object_id: str) -> Optional[tuple[str, str]]:
        goal = self.goal.object_goal(object_id)
        type_def = self.world.object(object_id).type_def
        options = []
        for slot in type_def.informable_slots:
            for value in type_def.values(slot):
                if value == goal.constraints.get(slot):
                    continue
                constraints = dict(goal.literal_constraints)
                constraints[slot] = value
                matches = self.kb.query(goal.type_name, constraints)
                if matches:
                    options.append((slot, value, matches[0]))
        if not options:
            return None
        slot, value, target = options[int(self.rng.integers(len(options)))]
        self.goal.change_constraint(object_id, slot, value, target)
        agenda = self.agendas[object_id]
        agenda.accepted = None
        agenda.received = set()
        agenda.corrected.discard(slot)
        agenda.drop(slot)
        return slot, value

    # responses

    def _answer_request(self, object_id: str, act: DialogueAct) -> DialogueAct:
        type_def = self.world.object(object_id).type_def
        fillers = []
        for filler in act.fillers_for(object_id):
            if type_def.is_informable(filler.slot):
                fillers.append(self._value_filler(object_id, filler.slot))
                self.agendas[object_id].drop(filler.slot)
        if not fillers:
            return self._reinform(object_id)
        return DialogueAct(ActType.INFORM, tuple(fillers))

    def _corrections(self, object_id: str, slots: list[str]) -> DialogueAct:
        for slot in slots:
            self.agendas[object_id].drop(slot)
            self.agendas[object_id].corrected.add(slot)
        return DialogueAct(ActType.NEGATE, tuple(self._value_filler(object_id, s, correction=True) for s in slots))

    def _answer_confirm(self, object_id: str, act: DialogueAct) -> DialogueAct:
        constraints = self.goal.object_goal(object_id).constraints
        wrong = [
            f.slot
            for f in act.fillers_for(object_id)
            if f.literal is not None and constraints.get(f.slot, DONTCARE) not in (DONTCARE, f.literal)
        ]
        return self._corrections(object_id, wrong) if wrong else DialogueAct(ActType.AFFIRM)

    def _answer_relation_confirm(self, object_id: str, act: DialogueAct) -> DialogueAct:
        constraints = self.goal.object_goal(object_id).constraints
        wrong = []
        for filler in act.relation_fillers:
            rel = self.world.relation_between(filler.entity, filler.value.entity)
            if rel is None or object_id not in rel.endpoints:
                continue
            attr = rel.attribute_between(filler.entity, filler.slot, filler.value.entity, filler.value.slot)
            slot = rel.slot_of(attr, object_id)
            if constraints.get(slot, DONTCARE) == DONTCARE:
                continue
            related = [r for r in self.goal.related_slots(self.world, object_id, slot) if r.attribute == attr.name]
            if not any(self.goal.is_valid(self.world, object_id, r) for r in related):
                wrong.append(slot)
        return self._corrections(object_id, wrong) if wrong else DialogueAct(ActType.AFFIRM)

    def _answer_offer(self, object_id: str, name: str, act: DialogueAct) -> DialogueAct:
        goal = self.goal.object_goal(object_id)
        agenda = self.agendas[object_id]
        record = self.kb.record_by_name(goal.type_name, name)
        if record is None:
            return self._reinform(object_id)
        violated = [slot for slot, value in goal.literal_constraints.items() if record.get(slot) != value]
        if violated:
            agenda.accepted = None
            return self._corrections(object_id, violated)

        if agenda.accepted != name:
            agenda.accepted = name
            agenda.received = set()
        agenda.awaiting_alternatives = False
        agenda.received |= {f.slot for f in act.fillers_for(object_id) if f.slot in goal.requests}
        pending = [slot for slot in goal.requests if slot not in agenda.received]
        if pending:
            return DialogueAct(ActType.REQUEST, tuple(SlotFiller(object_id, slot) for slot in pending))
        if not agenda.reqalts_used and self.rng.random() < self.config.reqalts:
            agenda.reqalts_used = True
            agenda.awaiting_alternatives = True
            return DialogueAct(ActType.REQALTS)
        return self._finish_object(object_id)

    def _answer_no_venue(self, object_id: str, act: DialogueAct) -> DialogueAct:
        agenda = self.agendas[object_id]
        constraints = self.goal.object_goal(object_id).constraints
        wrong = [
            f.slot
            for f in act.fillers_for(object_id)
            if f.slot != NAME_SLOT
            and f.literal is not None
            and constraints.get(f.slot, DONTCARE) not in (DONTCARE, f.literal)
        ]
        if wrong:
            return self._corrections(object_id, wrong)
        if agenda.awaiting_alternatives:
            agenda.awaiting_alternatives = False
            if self.rng.random() < self.config.reqalts_goal_change:
                changed = self._change_goal(object_id)
                if changed is not None:
                    return DialogueAct(ActType.REQALTS, (self._value_filler(object_id, changed[0]),))
            return self._finish_object(object_id)
        if agenda.accepted is None and self.rng.random() < self.config.goal_change:
            changed = self._change_goal(object_id)
            if changed is not None:
                return DialogueAct(ActType.INFORM, (self._value_filler(object_id, changed[0]),))
        return self._reinform(object_id)

    def _breaks_correction(self, object_id: str, name: str) -> bool:
        goal = self.goal.object_goal(object_id)
        record = self.kb.record_by_name(goal.type_name, name)
        if record is None:
            return False
        literal = goal.literal_constraints
        return any(slot in literal and record.get(slot) != literal[slot] for slot in self.agendas[object_id].corrected)

    def _track_progress(self, system_act: DialogueAct) -> int:
        current = self.current
        if current is not None and not self.agendas[current].started:
            return 0
        if system_act == self._last_system or system_act.act_type == ActType.HELLO:
            return self._stalled + 1
        if current is None or current not in system_act.entities():
            return self._stalled
        agenda = self.agendas[current]
        if system_act.act_type == ActType.CONFIRM:
            return self._stalled
        if system_act.act_type == ActType.REQUEST:
            asked = {f.slot for f in system_act.fillers_for(current)}
            return self._stalled + 1 if asked and asked <= agenda.given else 0
        name = system_act.literal(current, NAME_SLOT)
        if system_act.act_type == ActType.INFORM and name not in (None, NO_VENUE):
            return self._stalled + 1 if self._breaks_correction(current, name) else 0
        return 0

    def respond(self, system_act: DialogueAct) -> DialogueAct:
        """The user's true act in reply to ``system_act``."""
        if self.finished:
            return DialogueAct(ActType.BYE)
        self._stalled = self._track_progress(system_act)
        self._last_system = system_act
        if system_act.act_type == ActType.BYE:
            return self._hang_up()
        if self._stalled >= self.config.patience:
            logger.debug(f"User lost patience after {self._stalled} unhelpful system turns")
            return self._hang_up()

        current = self.current
        if current is None:
            return self._hang_up()
        if not self.agendas[current].started:
            return self._open_object(current)
        if system_act.act_type == ActType.HELLO or current not in system_act.entities():
            return self._reinform(current)

        if system_act.act_type == ActType.REQUEST:
            return self._answer_request(current, system_act)
        if system_act.act_type == ActType.CONFIRM:
            if system_act.relation_fillers:
                return self._answer_relation_confirm(current, system_act)
            return self._answer_confirm(current, system_act)
        if system_act.act_type == ActType.INFORM:
            name = system_act.literal(current, NAME_SLOT)
            if name == NO_VENUE:
                return self._answer_no_venue(current, system_act)
            if name is not None:
                return self._answer_offer(current, name, system_act)
        return self._reinform(current)


def user_respond(user: UserSimulator, system_act: DialogueAct) -> DialogueAct:
    return user.respond(system_act)
