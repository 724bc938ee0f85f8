"""Exploratory statistics over the expanded tables, plus network exports.

Counts follow the published table layout: totals are (pair, subject) rows,
unique pairs collapse the subject dimension, and "not recorded" means no
biography mention exists for the pair. Percentages are always recomputed
from the raw counts when rendered.
"""

import json
from dataclasses import dataclass

from .errors import UnsupportedTableError
from .expansion import (
    TABLE_INSTITUTIONS,
    TABLE_MERGED,
    TABLE_TOPICS,
    ExpandedDataset,
    require_annotations,
)
from .store import Store


@dataclass(frozen=True)
class HistorianRelationStats:
    table: str
    total_relations: int
    unique_pairs: int
    valid_relations: int
    valid_unique_pairs: int
    valid_not_recorded: int
    valid_on_shared_subject: int | None  # n/a for the institutions table
    unique_historians: int
    unique_subjects: int
    # auxiliary uniques for the rows with collaborated_on_subject = 1
    on_subject_uniques: dict | None = None

    def as_tuple(self):
        return (
            self.total_relations,
            self.unique_pairs,
            self.valid_relations,
            self.valid_unique_pairs,
            self.valid_not_recorded,
            self.valid_on_shared_subject,
        )


@dataclass(frozen=True)
class CollectionRelationStats:
    table: str
    valid_collection_relations: int
    not_recorded_in_biographies: int

    def as_tuple(self):
        return (self.valid_collection_relations, self.not_recorded_in_biographies)


@dataclass(frozen=True)
class NetworkExport:
    mode: str
    nodes: tuple  # (id, label, kind)
    edges: tuple  # (pair, weight)
    density: float

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "nodes": [{"id": i, "label": l, "kind": k} for i, l, k in self.nodes],
            "edges": [
                {"source": p[0], "target": p[1], "weight": w} for p, w in self.edges
            ],
            "density": self.density,
        }


def historian_stats(dataset: ExpandedDataset) -> HistorianRelationStats:
    """Relation counts for one table; rows must carry annotations."""
    require_annotations(dataset)
    rows = dataset.rows
    valid_rows = [r for r in rows if r.annotation.relation_exists == 1]
    valid_pairs = {r.pair for r in valid_rows}
    on_subject = None
    on_subject_uniques = None
    if dataset.table != TABLE_INSTITUTIONS:
        subject_rows = [
            r for r in valid_rows if (r.annotation.collaborated_on_subject or 0) == 1
        ]
        on_subject = len(subject_rows)
        on_subject_uniques = {
            "historians": len({h for r in subject_rows for h in r.pair}),
            "pairs": len({r.pair for r in subject_rows}),
            "subjects": len({r.shared_subject for r in subject_rows}),
        }
    return HistorianRelationStats(
        table=dataset.table,
        total_relations=len(rows),
        unique_pairs=len(dataset.unique_pairs()),
        valid_relations=len(valid_rows),
        valid_unique_pairs=len(valid_pairs),
        valid_not_recorded=sum(1 for r in valid_rows if r.flags.bio_one == 0),
        valid_on_shared_subject=on_subject,
        unique_historians=len({h for r in rows for h in r.pair}),
        unique_subjects=len({r.shared_subject for r in rows}),
        on_subject_uniques=on_subject_uniques,
    )


def merged_stats(merged: ExpandedDataset) -> HistorianRelationStats:
    return historian_stats(merged)


def collection_stats(dataset: ExpandedDataset) -> CollectionRelationStats:
    """Historian-collection relation counts (A8/A10 columns required)."""
    if dataset.table == TABLE_INSTITUTIONS:
        raise UnsupportedTableError(
            "the institutions table has no archive-relevance columns"
        )
    require_annotations(dataset)
    relevant = [
        r
        for r in dataset.rows
        if r.annotation.relation_exists == 1
        and (
            (r.annotation.h2_relevant_to_h1_archive or 0) == 1
            or (r.annotation.h1_relevant_to_h2_archive or 0) == 1
        )
    ]
    return CollectionRelationStats(
        table=dataset.table,
        valid_collection_relations=len(relevant),
        not_recorded_in_biographies=sum(1 for r in relevant if r.flags.bio_one == 0),
    )


def network_export(store: Store, dataset: ExpandedDataset, mode: str) -> NetworkExport:
    """Historian co-occurrence network with shared-subject edge weights.

    Nodes are the historians holding at least one subject link of the given
    kind, whether or not they end up in a pair; density is taken over those
    nodes.
    """
    kind = {"topics": "topic", "institutions": "institution"}[mode]
    nodes = [
        (h.id, h.label, h.kind)
        for h in store.entities("historian")
        if store.objects_of(h.id, "subject", kind)
    ]
    weights: dict[tuple, int] = {}
    for row in dataset.rows:
        weights[row.pair] = weights.get(row.pair, 0) + 1
    edges = tuple(sorted(weights.items()))
    n = len(nodes)
    density = (2 * len(edges) / (n * (n - 1))) if n > 1 else 0.0
    return NetworkExport(mode=mode, nodes=tuple(nodes), edges=edges, density=density)


@dataclass(frozen=True)
class EdaReport:
    historian_rows: tuple  # HistorianRelationStats per table
    collection_rows: tuple  # CollectionRelationStats per table
    densities: dict

    def counts(self) -> dict:
        return {
            "historian_relations": {
                s.table: {
                    "total_relations": s.total_relations,
                    "unique_pairs": s.unique_pairs,
                    "valid_relations": s.valid_relations,
                    "valid_unique_pairs": s.valid_unique_pairs,
                    "valid_not_recorded": s.valid_not_recorded,
                    "valid_on_shared_subject": s.valid_on_shared_subject,
                    "unique_historians": s.unique_historians,
                    "unique_subjects": s.unique_subjects,
                    "on_subject_uniques": s.on_subject_uniques,
                }
                for s in self.historian_rows
            },
            "collection_relations": {
                s.table: {
                    "valid_collection_relations": s.valid_collection_relations,
                    "not_recorded_in_biographies": s.not_recorded_in_biographies,
                }
                for s in self.collection_rows
            },
            "network_density": self.densities,
        }

    def text(self) -> str:
        lines = ["Relations between historians"]
        header = (
            "table",
            "total",
            "pairs",
            "valid",
            "valid pairs",
            "valid not recorded",
            "valid on subject",
        )
        lines.append("  " + " | ".join(header))
        for s in self.historian_rows:
            pct_valid = _pct(s.valid_relations, s.total_relations)
            pct_missing = _pct(s.valid_not_recorded, s.valid_relations)
            cells = (
                s.table,
                str(s.total_relations),
                str(s.unique_pairs),
                f"{s.valid_relations} ({pct_valid})",
                str(s.valid_unique_pairs),
                f"{s.valid_not_recorded} ({pct_missing})",
                "n/a" if s.valid_on_shared_subject is None else str(s.valid_on_shared_subject),
            )
            lines.append("  " + " | ".join(cells))
        lines.append("")
        lines.append("Relations between historians and collections")
        lines.append("  table | valid collection relations | not recorded in biographies")
        for s in self.collection_rows:
            lines.append(
                f"  {s.table} | {s.valid_collection_relations} | {s.not_recorded_in_biographies}"
            )
        lines.append("")
        for mode, density in sorted(self.densities.items()):
            lines.append(f"{mode} network density: {density:.2f}")
        return "\n".join(lines) + "\n"


def build_report(
    store: Store,
    topics: ExpandedDataset,
    insts: ExpandedDataset,
    merged: ExpandedDataset,
) -> EdaReport:
    return EdaReport(
        historian_rows=(
            historian_stats(topics),
            historian_stats(insts),
            merged_stats(merged),
        ),
        collection_rows=(
            collection_stats(topics),
            collection_stats(merged),
        ),
        densities={
            "topics": network_export(store, topics, "topics").density,
            "institutions": network_export(store, insts, "institutions").density,
        },
    )


def write_report(report: EdaReport, out_dir) -> None:
    from pathlib import Path

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "eda_report.txt").write_text(report.text(), encoding="utf-8")
    (out_dir / "eda_counts.json").write_text(
        json.dumps(report.counts(), indent=2), encoding="utf-8"
    )


def _pct(part: int, whole: int) -> str:
    if whole == 0:
        return "n/a"
    return f"{100 * part / whole:.0f}%"
