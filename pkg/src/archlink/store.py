"""In-memory graph store: entities, provenance-tagged statements, free texts.

The store is the substrate every other module queries. Statements keep their
named graph as an opaque tag; provenance is preserved, never interpreted.
"""

import hashlib
import threading
from dataclasses import dataclass, field

from .errors import (
    ConflictError,
    InvalidPairError,
    KindError,
    NotFoundError,
    ReferentialError,
    VocabularyError,
)

ENTITY_KINDS = ("historian", "collection", "institution", "topic")

# Closed relation vocabulary. Symmetric predicates are queried in both
# directions; everything else is directional.
PREDICATES = (
    "produced",
    "subject",
    "interacted_with",
    "interacted_on",
    "produced_by",
    "includes_materials_relevant_to",
    "held_by",
    "is_related_to",
)
SYMMETRIC_PREDICATES = frozenset({"interacted_with", "is_related_to"})

STATEMENT_SOURCES = ("catalogue", "mention_detector", "annotation", "decision")

TEXT_FIELDS = ("biography", "description")
_TEXT_FIELD_KIND = {"biography": "historian", "description": "collection"}


@dataclass(frozen=True)
class Entity:
    id: str
    kind: str
    label: str
    aliases: tuple[str, ...] = ()
    external_id: str | None = None

    def __post_init__(self):
        if not self.id:
            raise ConflictError("entity id must be non-empty")
        if self.kind not in ENTITY_KINDS:
            raise KindError(f"unknown entity kind {self.kind!r}", {"id": self.id})
        if not self.label:
            raise ConflictError(f"entity {self.id} has an empty label")
        if len(set(self.aliases)) != len(self.aliases):
            raise ConflictError(f"entity {self.id} has duplicate aliases")


@dataclass(frozen=True)
class Statement:
    subject: str
    predicate: str
    object: str
    graph: str
    source: str = "catalogue"

    def __post_init__(self):
        if self.predicate not in PREDICATES:
            raise VocabularyError(f"unknown predicate {self.predicate!r}")
        if self.source not in STATEMENT_SOURCES:
            raise VocabularyError(f"unknown statement source {self.source!r}")

    @property
    def key(self) -> tuple[str, str, str, str]:
        return (self.subject, self.predicate, self.object, self.graph)


@dataclass(frozen=True)
class TextRecord:
    entity_id: str
    field: str
    text: str

    def __post_init__(self):
        if self.field not in TEXT_FIELDS:
            raise KindError(f"unknown text field {self.field!r}")


def canonical_pair(a: str, b: str) -> tuple[str, str]:
    """Order a pair of entity ids canonically (byte order, smaller first)."""
    if a == b:
        raise InvalidPairError(f"pair requires two distinct entities, got {a!r} twice")
    return (a, b) if a.encode() <= b.encode() else (b, a)


@dataclass
class Store:
    """Single-writer, multiple-reader store of entities, statements, texts."""

    _entities: dict = field(default_factory=dict)
    _statements: dict = field(default_factory=dict)  # key -> Statement
    _by_subject: dict = field(default_factory=dict)  # (subject, predicate) -> set of objects
    _texts: dict = field(default_factory=dict)  # (entity_id, field) -> TextRecord
    _lock: threading.RLock = field(default_factory=threading.RLock, repr=False)

    # -- entities ----------------------------------------------------------

    def add_entity(self, entity: Entity) -> None:
        with self._lock:
            existing = self._entities.get(entity.id)
            if existing is not None:
                if existing != entity:
                    raise ConflictError(
                        f"entity {entity.id} already present with different fields",
                        {"id": entity.id},
                    )
                return
            self._entities[entity.id] = entity

    def entity(self, entity_id: str) -> Entity:
        ent = self._entities.get(entity_id)
        if ent is None:
            raise NotFoundError(f"unknown entity {entity_id!r}", {"id": entity_id})
        return ent

    def has_entity(self, entity_id: str) -> bool:
        return entity_id in self._entities

    def entities(self, kind: str | None = None) -> list[Entity]:
        ents = self._entities.values()
        if kind is not None:
            ents = (e for e in ents if e.kind == kind)
        return sorted(ents, key=lambda e: e.id)

    # -- statements --------------------------------------------------------

    def add_statement(self, stmt: Statement) -> bool:
        """Store a statement; returns False when it was already present."""
        with self._lock:
            for eid, role in ((stmt.subject, "subject"), (stmt.object, "object")):
                if eid not in self._entities:
                    raise ReferentialError(
                        f"statement {role} {eid!r} is not in the store",
                        {"statement": stmt.key},
                    )
            if stmt.key in self._statements:
                return False
            self._statements[stmt.key] = stmt
            self._by_subject.setdefault((stmt.subject, stmt.predicate), set()).add(stmt.object)
            return True

    def statements(self) -> list[Statement]:
        return sorted(self._statements.values(), key=lambda s: s.key)

    def statements_about(self, entity_id: str) -> list[Statement]:
        return [s for s in self.statements() if entity_id in (s.subject, s.object)]

    def has_statement(self, subject: str, predicate: str, object_: str) -> bool:
        """True when (subject, predicate, object) exists in any graph.

        Symmetric predicates match in either direction.
        """
        pairs = [(subject, object_)]
        if predicate in SYMMETRIC_PREDICATES:
            pairs.append((object_, subject))
        for s, o in pairs:
            if o in self._by_subject.get((s, predicate), ()):
                return True
        return False

    def objects_of(self, subject: str, predicate: str, kind_filter: str | None = None) -> set[str]:
        """All objects of (subject, predicate) across named graphs, deduplicated."""
        if subject not in self._entities:
            raise NotFoundError(f"unknown entity {subject!r}", {"id": subject})
        objs = set(self._by_subject.get((subject, predicate), ()))
        if kind_filter is not None:
            objs = {o for o in objs if self._entities[o].kind == kind_filter}
        return objs

    def shared_objects(self, a: str, b: str, predicate: str, kind_filter: str) -> set[str]:
        """Objects linked from both a and b; symmetric in (a, b)."""
        if a == b:
            raise InvalidPairError("shared_objects needs two distinct entities")
        return self.objects_of(a, predicate, kind_filter) & self.objects_of(b, predicate, kind_filter)

    # -- texts ---------------------------------------------------------------

    def set_text(self, record: TextRecord) -> None:
        """Attach a text; re-setting the same (entity, field) replaces it."""
        with self._lock:
            ent = self.entity(record.entity_id)
            wanted = _TEXT_FIELD_KIND[record.field]
            if ent.kind != wanted:
                raise KindError(
                    f"{record.field} texts belong to {wanted} entities, "
                    f"{record.entity_id} is a {ent.kind}",
                    {"id": record.entity_id},
                )
            self._texts[(record.entity_id, record.field)] = record

    def text(self, entity_id: str, fld: str) -> TextRecord | None:
        return self._texts.get((entity_id, fld))

    def texts(self) -> list[TextRecord]:
        return [self._texts[k] for k in sorted(self._texts)]

    # -- integrity & identity ----------------------------------------------

    def check_referential_integrity(self) -> list[Statement]:
        """Full scan; returns statements referencing absent entities (none, normally)."""
        bad = []
        for stmt in self._statements.values():
            if stmt.subject not in self._entities or stmt.object not in self._entities:
                bad.append(stmt)
        return bad

    def content_hash(self) -> str:
        """Deterministic digest of store content, used as dataset provenance."""
        h = hashlib.sha256()
        for ent in self.entities():
            h.update(repr((ent.id, ent.kind, ent.label, ent.aliases, ent.external_id)).encode())
        for stmt in self.statements():
            h.update(repr(stmt.key + (stmt.source,)).encode())
        for rec in self.texts():
            h.update(repr((rec.entity_id, rec.field, rec.text)).encode())
        return h.hexdigest()

    def counts(self) -> dict:
        return {
            "entities": len(self._entities),
            "statements": len(self._statements),
            "texts": len(self._texts),
        }
