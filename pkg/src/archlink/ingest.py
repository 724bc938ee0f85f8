"""Dump-file parsing: entities, statements, texts, annotation tables.

Formats are deliberately plain so the published dump maps on with a column
rename: JSON lines for entities and texts, comma-delimited files with exact
Table-style headers (A1..A11 / I1..I5) for the annotation tables.

Parsing is fail-fast: a malformed line aborts the whole file rather than
silently dropping rows, which would corrupt every downstream statistic.
"""

import csv
import json
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .errors import LabelError, ParseError, SchemaError
from .store import Entity, Statement, Store, TextRecord

FORMAT_VERSION = "1"

ARTISTS_PERIODS_HEADER = ["A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8", "A9", "A10", "A11"]
INSTITUTIONS_HEADER = ["I1", "I2", "I3", "I4", "I5"]

# Annotation fields holding {0, 0.5, 1} labels, per table kind.
LABEL_FIELDS = (
    "relation_exists",
    "recorded_in_one_bio",
    "recorded_in_both_bios",
    "collaborated_on_subject",
    "h2_relevant_to_h1_archive",
    "h2_mentioned_in_h1_archive",
    "h1_relevant_to_h2_archive",
    "h1_mentioned_in_h2_archive",
)


@dataclass(frozen=True)
class AnnotationRecord:
    """One row of an expanded-and-annotated candidate table."""

    table: str  # artists_periods | institutions
    art_hist_1: str
    art_hist_2: str
    shared_subject: str
    relation_exists: float
    recorded_in_one_bio: float | None = None
    recorded_in_both_bios: float | None = None
    collaborated_on_subject: float | None = None
    h2_relevant_to_h1_archive: float | None = None
    h2_mentioned_in_h1_archive: float | None = None
    h1_relevant_to_h2_archive: float | None = None
    h1_mentioned_in_h2_archive: float | None = None
    relation_kind_note: str | None = None


@dataclass(frozen=True)
class DumpManifest:
    entities_path: Path
    statements_path: Path
    texts_path: Path
    annotations_paths: dict  # table kind -> Path
    format_version: str = FORMAT_VERSION

    @classmethod
    def load(cls, path: str | Path) -> "DumpManifest":
        path = Path(path)
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(f"manifest {path} is not valid JSON: {exc}") from exc
        base = path.parent
        try:
            return cls(
                entities_path=base / doc["entities"],
                statements_path=base / doc["statements"],
                texts_path=base / doc["texts"],
                annotations_paths={k: base / v for k, v in doc.get("annotations", {}).items()},
                format_version=str(doc.get("format_version", FORMAT_VERSION)),
            )
        except KeyError as exc:
            raise SchemaError(f"manifest {path} is missing key {exc}") from exc


def load_entities(store: Store, path: str | Path) -> int:
    """Load JSON-lines entity records; returns the number of entities added."""
    count = 0
    for lineno, doc in _iter_jsonl(path):
        for key in ("id", "kind", "label"):
            if key not in doc:
                raise ParseError(f"entity record missing {key!r}", line=lineno)
        entity = Entity(
            id=doc["id"],
            kind=doc["kind"],
            label=doc["label"],
            aliases=tuple(doc.get("aliases", ())),
            external_id=doc.get("external_id"),
        )
        store.add_entity(entity)
        count += 1
    return count


def load_statements(store: Store, path: str | Path) -> int:
    """Load the statements CSV; returns count actually stored (post-dedup)."""
    path = Path(path)
    stored = 0
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        expected = ["subject", "predicate", "object", "graph"]
        if reader.fieldnames != expected:
            raise SchemaError(
                f"statements file {path} header is {reader.fieldnames}, expected {expected}"
            )
        for lineno, row in enumerate(reader, start=2):
            if any(row[k] is None or row[k] == "" for k in expected):
                raise ParseError("statement row has empty fields", line=lineno)
            stmt = Statement(
                subject=row["subject"],
                predicate=row["predicate"],
                object=row["object"],
                graph=row["graph"],
            )
            if store.add_statement(stmt):
                stored += 1
    return stored


def load_texts(store: Store, path: str | Path) -> int:
    """Load JSON-lines text records; last record wins per (entity, field)."""
    count = 0
    for lineno, doc in _iter_jsonl(path):
        for key in ("entity_id", "field", "text"):
            if key not in doc:
                raise ParseError(f"text record missing {key!r}", line=lineno)
        store.set_text(TextRecord(doc["entity_id"], doc["field"], doc["text"]))
        count += 1
    return count


def load_annotations(path: str | Path, table_kind: str) -> list[AnnotationRecord]:
    """Parse an annotation table into records with labels in {0, 0.5, 1}."""
    path = Path(path)
    if table_kind == "artists_periods":
        header = ARTISTS_PERIODS_HEADER
    elif table_kind == "institutions":
        header = INSTITUTIONS_HEADER
    else:
        raise SchemaError(f"unknown annotation table kind {table_kind!r}")

    records = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            got = next(reader)
        except StopIteration:
            raise SchemaError(f"annotation file {path} is empty") from None
        if got != header:
            raise SchemaError(f"annotation header is {got}, expected {header}")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise ParseError(f"expected {len(header)} cells, got {len(row)}", line=lineno)
            cells = dict(zip(header, row))
            if table_kind == "artists_periods":
                rec = AnnotationRecord(
                    table=table_kind,
                    art_hist_1=cells["A1"],
                    art_hist_2=cells["A2"],
                    shared_subject=cells["A3"],
                    relation_exists=_parse_label(cells["A4"], lineno),
                    recorded_in_one_bio=_parse_label(cells["A5"], lineno),
                    recorded_in_both_bios=_parse_label(cells["A6"], lineno),
                    collaborated_on_subject=_parse_label(cells["A7"], lineno),
                    h2_relevant_to_h1_archive=_parse_label(cells["A8"], lineno),
                    h2_mentioned_in_h1_archive=_parse_label(cells["A9"], lineno),
                    h1_relevant_to_h2_archive=_parse_label(cells["A10"], lineno),
                    h1_mentioned_in_h2_archive=_parse_label(cells["A11"], lineno),
                )
            else:
                rec = AnnotationRecord(
                    table=table_kind,
                    art_hist_1=cells["I1"],
                    art_hist_2=cells["I2"],
                    shared_subject=cells["I3"],
                    relation_exists=_parse_label(cells["I4"], lineno),
                    relation_kind_note=cells["I5"] or None,
                )
            records.append(rec)
    return records


def normalize_labels(records: list[AnnotationRecord]) -> list[AnnotationRecord]:
    """Replace every 0.5 label with 0; idempotent, order preserving."""
    out = []
    for rec in records:
        changes = {
            f.name: 0.0
            for f in fields(rec)
            if f.name in LABEL_FIELDS and getattr(rec, f.name) == 0.5
        }
        out.append(replace(rec, **changes) if changes else rec)
    return out


def count_half_labels(records: list[AnnotationRecord]) -> int:
    """How many 0.5 cells normalization would replace (pre-normalization figure)."""
    return sum(
        1
        for rec in records
        for name in LABEL_FIELDS
        if getattr(rec, name) == 0.5
    )


def load_dump(store: Store, manifest: DumpManifest) -> dict:
    """Load a full dump; returns per-file counts and normalized annotations."""
    result = {
        "entities": load_entities(store, manifest.entities_path),
        "statements": load_statements(store, manifest.statements_path),
        "texts": load_texts(store, manifest.texts_path),
        "annotations": {},
        "half_labels_replaced": 0,
    }
    for table_kind, path in sorted(manifest.annotations_paths.items()):
        records = load_annotations(path, table_kind)
        result["half_labels_replaced"] += count_half_labels(records)
        result["annotations"][table_kind] = normalize_labels(records)
    return result


# -- export (round-trip counterpart) ----------------------------------------


def export_store(store: Store, out_dir: str | Path) -> DumpManifest:
    """Write the store back out in the ingest formats."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    entities_path = out_dir / "entities.jsonl"
    with entities_path.open("w", encoding="utf-8") as fh:
        for ent in store.entities():
            doc = {"id": ent.id, "kind": ent.kind, "label": ent.label, "aliases": list(ent.aliases)}
            if ent.external_id is not None:
                doc["external_id"] = ent.external_id
            fh.write(json.dumps(doc, ensure_ascii=False) + "\n")

    statements_path = out_dir / "statements.csv"
    with statements_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["subject", "predicate", "object", "graph"])
        for stmt in store.statements():
            writer.writerow([stmt.subject, stmt.predicate, stmt.object, stmt.graph])

    texts_path = out_dir / "texts.jsonl"
    with texts_path.open("w", encoding="utf-8") as fh:
        for rec in store.texts():
            fh.write(
                json.dumps(
                    {"entity_id": rec.entity_id, "field": rec.field, "text": rec.text},
                    ensure_ascii=False,
                )
                + "\n"
            )

    manifest = DumpManifest(
        entities_path=entities_path,
        statements_path=statements_path,
        texts_path=texts_path,
        annotations_paths={},
    )
    manifest_doc = {
        "format_version": FORMAT_VERSION,
        "entities": entities_path.name,
        "statements": statements_path.name,
        "texts": texts_path.name,
        "annotations": {},
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest_doc, indent=2), encoding="utf-8")
    return manifest


def write_annotations(records: list[AnnotationRecord], path: str | Path) -> None:
    """Write annotation records back in their tabular format."""
    path = Path(path)
    if not records:
        raise SchemaError("cannot export an empty annotation table")
    table_kind = records[0].table
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if table_kind == "artists_periods":
            writer.writerow(ARTISTS_PERIODS_HEADER)
            for rec in records:
                writer.writerow(
                    [rec.art_hist_1, rec.art_hist_2, rec.shared_subject]
                    + [
                        _format_label(v)
                        for v in (
                            rec.relation_exists,
                            rec.recorded_in_one_bio,
                            rec.recorded_in_both_bios,
                            rec.collaborated_on_subject,
                            rec.h2_relevant_to_h1_archive,
                            rec.h2_mentioned_in_h1_archive,
                            rec.h1_relevant_to_h2_archive,
                            rec.h1_mentioned_in_h2_archive,
                        )
                    ]
                )
        else:
            writer.writerow(INSTITUTIONS_HEADER)
            for rec in records:
                writer.writerow(
                    [
                        rec.art_hist_1,
                        rec.art_hist_2,
                        rec.shared_subject,
                        _format_label(rec.relation_exists),
                        rec.relation_kind_note or "",
                    ]
                )


def _iter_jsonl(path: str | Path):
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc}", line=lineno) from exc


def _parse_label(cell: str, lineno: int) -> float:
    cell = cell.strip()
    if cell == "":
        return 0.0  # blank cells mean "could not be validated"
    if cell in ("0", "0.0"):
        return 0.0
    if cell in ("1", "1.0"):
        return 1.0
    if cell == "0.5":
        return 0.5
    raise LabelError(f"label {cell!r} outside {{0, 0.5, 1}}", {"line": lineno})


def _format_label(value: float | None) -> str:
    if value is None:
        return ""
    if value == 0.5:
        return "0.5"
    return str(int(value))
