"""Conversational worlds, objects, relations and marginal beliefs."""

from .marginal import RELATION_DOMAIN, BeliefError, Marginal, slot_domain
from .models import (
    NOT_EQUALS,
    ContextState,
    ConversationalObject,
    ConversationalRelation,
    ConversationalWorld,
    Entity,
    RelationContextState,
    SlotHistory,
    WorldBelief,
    WorldError,
)
from .world import (
    activate_relation,
    apply_offer,
    current_focus,
    dump_world,
    new_world,
    refresh_relation_contexts,
    relation_id,
    set_focus,
    update_context,
    update_relation_context,
)

__all__ = [
    "NOT_EQUALS",
    "RELATION_DOMAIN",
    "BeliefError",
    "ContextState",
    "ConversationalObject",
    "ConversationalRelation",
    "ConversationalWorld",
    "Entity",
    "Marginal",
    "RelationContextState",
    "SlotHistory",
    "WorldBelief",
    "WorldError",
    "activate_relation",
    "apply_offer",
    "current_focus",
    "dump_world",
    "new_world",
    "refresh_relation_contexts",
    "relation_id",
    "set_focus",
    "slot_domain",
    "update_context",
    "update_relation_context",
]
