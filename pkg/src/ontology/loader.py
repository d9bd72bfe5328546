"""Loading and writing ontology + knowledge base documents.

The document is YAML with three top-level keys::

    version: 1
    types:
      - name: CamHotels
        type_label: placetostay
        informable:
          - {name: kind, values: [guesthouse, hotel]}
          - {name: area, values: [centre, east, north, south, west], concept: area}
        requestable: [kind, area, name, price]
    records:
      CamHotels:
        - {name: limehouse, kind: guesthouse, area: north, price: "..."}

Unknown keys are rejected at every level. Duplicate mapping keys are
rejected as well (plain ``yaml.safe_load`` would keep the last one).
"""

from pathlib import Path
from typing import Any

import yaml
from loguru import logger
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from .models import KnowledgeBase, KnowledgeBaseError, ObjectTypeDef, OntologyError, _as_text

SUPPORTED_VERSIONS = {1}


class _UniqueKeyLoader(yaml.SafeLoader):
    """SafeLoader that refuses duplicate keys in a mapping."""

    def construct_mapping(self, node, deep=False):
        seen = set()
        for key_node, _ in node.value:
            key = self.construct_object(key_node, deep=deep)
            if key in seen:
                mark = key_node.start_mark
                raise OntologyError(f"duplicate key '{key}'", location=f"line {mark.line + 1}, column {mark.column + 1}")
            seen.add(key)
        return super().construct_mapping(node, deep=deep)


class OntologyDocument(BaseModel):
    """Schema of the whole file."""

    model_config = ConfigDict(extra="forbid")

    version: int = 1
    types: list[ObjectTypeDef]
    records: dict[str, list[dict[str, str]]] = {}

    @field_validator("records", mode="before")
    @classmethod
    def coerce_records(cls, v: Any) -> Any:
        if not isinstance(v, dict):
            return v
        return {
            type_name: [
                {slot: _as_text(value) for slot, value in row.items()} if isinstance(row, dict) else row
                for row in rows
            ]
            if isinstance(rows, list)
            else rows
            for type_name, rows in v.items()
        }


def _location(path: Path, loc: tuple) -> str:
    keys = ".".join(str(part) for part in loc)
    return f"{path}:{keys}" if keys else str(path)


def _check_concepts(types: list[ObjectTypeDef], path: Path) -> None:
    """Slots sharing a concept tag must declare identical value sets."""
    by_concept: dict[str, tuple[str, str, tuple[str, ...]]] = {}
    for type_def in types:
        for slot in type_def.informable:
            if slot.concept is None:
                continue
            seen = by_concept.setdefault(slot.concept, (type_def.name, slot.name, slot.values))
            if set(seen[2]) != set(slot.values):
                raise OntologyError(
                    f"slot '{type_def.name}.{slot.name}' has concept '{slot.concept}' but its values differ "
                    f"from '{seen[0]}.{seen[1]}'",
                    location=str(path),
                )


def parse_ontology(text: str, path: Path | str = "<string>") -> tuple[list[ObjectTypeDef], KnowledgeBase]:
    """Parse an ontology document from text."""
    path = Path(path)
    try:
        raw = yaml.load(text, Loader=_UniqueKeyLoader)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        where = f"{path}:line {mark.line + 1}" if mark else str(path)
        raise OntologyError(f"parse error: {e}", location=where) from e
    except OntologyError as e:
        raise OntologyError(str(e), location=str(path)) from e

    if not isinstance(raw, dict):
        raise OntologyError("document must be a mapping", location=str(path))

    try:
        document = OntologyDocument.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        raise OntologyError(first["msg"], location=_location(path, first["loc"])) from e

    if document.version not in SUPPORTED_VERSIONS:
        raise OntologyError(f"unsupported version {document.version}", location=f"{path}:version")

    names = [t.name for t in document.types]
    if len(set(names)) != len(names):
        raise OntologyError("duplicate type name", location=f"{path}:types")
    _check_concepts(document.types, path)

    try:
        kb = KnowledgeBase(document.types, document.records)
    except KnowledgeBaseError as e:
        raise OntologyError(str(e), location=str(path)) from e

    logger.debug(f"Loaded ontology {path}: {len(document.types)} types, {len(kb)} records")
    return document.types, kb


def load_ontology(path: Path | str) -> tuple[list[ObjectTypeDef], KnowledgeBase]:
    """
    Load and validate an ontology + knowledge base file.

    Args:
        path: YAML document path

    Returns:
        Tuple of type definitions and the knowledge base

    Raises:
        OntologyError: On parse errors or schema violations (message carries the location)
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise OntologyError(f"cannot read file: {e}", location=str(path)) from e
    return parse_ontology(text, path)


def dump_ontology(types: list[ObjectTypeDef], kb: KnowledgeBase) -> str:
    """Render types and records in the document format."""
    document: dict[str, Any] = {
        "version": 1,
        "types": [t.model_dump(mode="json", exclude_none=True) for t in types],
        "records": {t.name: [dict(row) for row in kb.records(t.name)] for t in types},
    }
    return yaml.safe_dump(document, sort_keys=False, allow_unicode=True, width=120)


def write_ontology(path: Path | str, types: list[ObjectTypeDef], kb: KnowledgeBase) -> Path:
    """Write types and records to ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_ontology(types, kb), encoding="utf-8")
    logger.info(f"Wrote ontology with {len(kb)} records to {path}")
    return path
