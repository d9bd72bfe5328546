"""Object types, relation derivation and the knowledge base."""

from .generator import DEFAULT_SIZES, generate_kb
from .loader import dump_ontology, load_ontology, parse_ontology, write_ontology
from .models import (
    DONTCARE,
    EQUALS,
    NAME_SLOT,
    NO_VENUE,
    NONE_VALUE,
    TYPE_SLOT,
    KnowledgeBase,
    KnowledgeBaseError,
    ObjectTypeDef,
    OntologyError,
    RelationAttributeDef,
    SlotDef,
    query_kb,
)
from .relations import derive_relations

__all__ = [
    "DEFAULT_SIZES",
    "DONTCARE",
    "EQUALS",
    "NAME_SLOT",
    "NO_VENUE",
    "NONE_VALUE",
    "TYPE_SLOT",
    "KnowledgeBase",
    "KnowledgeBaseError",
    "ObjectTypeDef",
    "OntologyError",
    "RelationAttributeDef",
    "SlotDef",
    "derive_relations",
    "dump_ontology",
    "generate_kb",
    "load_ontology",
    "parse_ontology",
    "query_kb",
    "write_ontology",
]
