"""Candidate-pair expansion from the graph and the annotation join.

Expansion produces one row per (historian pair, shared subject). The merged
table pairs every topic row of a pair with every institution the pair shares,
mirroring how the two published tables combine on the pair columns.
"""

from dataclasses import dataclass, field, replace

from .errors import IncompleteDataError, ProvenanceError
from .ingest import AnnotationRecord
from .mentions import MentionFlags
from .store import Store, canonical_pair

TABLE_TOPICS = "artists_periods"
TABLE_INSTITUTIONS = "institutions"
TABLE_MERGED = "merged"


@dataclass(frozen=True)
class PairFlags:
    """Pair-level mention flags; arch_a refers to the archive of pair[0]."""

    bio_one: int = 0
    bio_both: int = 0
    arch_a: int = 0
    arch_b: int = 0

    @property
    def arch_any(self) -> int:
        return int(self.arch_a or self.arch_b)


@dataclass(frozen=True)
class PairRow:
    pair: tuple[str, str]
    shared_subject: str
    table: str
    shared_institution: str | None = None  # merged rows carry both subjects
    annotation: AnnotationRecord | None = None
    flags: PairFlags = field(default=PairFlags())

    @property
    def sort_key(self):
        return (self.pair, self.shared_subject, self.shared_institution or "")


@dataclass(frozen=True)
class ExpandedDataset:
    table: str
    rows: tuple[PairRow, ...]
    store_hash: str

    def unique_pairs(self) -> set[tuple[str, str]]:
        return {row.pair for row in self.rows}

    def rows_for_pair(self, pair: tuple[str, str]) -> list[PairRow]:
        return [row for row in self.rows if row.pair == pair]


def expand_topic_pairs(store: Store) -> ExpandedDataset:
    return _expand(store, "topic", TABLE_TOPICS)


def expand_institution_pairs(store: Store) -> ExpandedDataset:
    return _expand(store, "institution", TABLE_INSTITUTIONS)


def _expand(store: Store, subject_kind: str, table: str) -> ExpandedDataset:
    historians = store.entities("historian")
    linked = [
        (h.id, store.objects_of(h.id, "subject", subject_kind))
        for h in historians
    ]
    linked = [(hid, objs) for hid, objs in linked if objs]
    rows = []
    for i, (h1, objs1) in enumerate(linked):
        for h2, objs2 in linked[i + 1 :]:
            shared = objs1 & objs2
            pair = canonical_pair(h1, h2)
            rows.extend(
                PairRow(pair=pair, shared_subject=subj, table=table)
                for subj in shared
            )
    rows.sort(key=lambda r: r.sort_key)
    return ExpandedDataset(table=table, rows=tuple(rows), store_hash=store.content_hash())


def merge_tables(topics: ExpandedDataset, insts: ExpandedDataset) -> ExpandedDataset:
    """Combine the two tables on shared pairs.

    A pair occurring in both tables contributes one merged row per
    (shared topic, shared institution) combination; the topic row's
    annotation and flags carry over.
    """
    if topics.store_hash != insts.store_hash:
        raise ProvenanceError(
            "datasets come from different store snapshots",
            {"topics": topics.store_hash, "institutions": insts.store_hash},
        )
    inst_by_pair: dict[tuple, list[PairRow]] = {}
    for row in insts.rows:
        inst_by_pair.setdefault(row.pair, []).append(row)
    rows = []
    for trow in topics.rows:
        for irow in inst_by_pair.get(trow.pair, ()):
            rows.append(
                replace(trow, table=TABLE_MERGED, shared_institution=irow.shared_subject)
            )
    rows.sort(key=lambda r: r.sort_key)
    return ExpandedDataset(table=TABLE_MERGED, rows=tuple(rows), store_hash=topics.store_hash)


def build_flag_map(records: list[AnnotationRecord]) -> dict:
    """Pair-level mention flags read off artists_periods annotation columns."""
    flags: dict[tuple, PairFlags] = {}
    for rec in records:
        if rec.table != TABLE_TOPICS:
            continue
        pair = canonical_pair(rec.art_hist_1, rec.art_hist_2)
        # A9/A11 are phrased for (art_hist_1, art_hist_2); swap when the
        # canonical order reverses them.
        if pair[0] == rec.art_hist_1:
            arch_a, arch_b = rec.h2_mentioned_in_h1_archive, rec.h1_mentioned_in_h2_archive
        else:
            arch_a, arch_b = rec.h1_mentioned_in_h2_archive, rec.h2_mentioned_in_h1_archive
        new = PairFlags(
            bio_one=int(rec.recorded_in_one_bio or 0),
            bio_both=int(rec.recorded_in_both_bios or 0),
            arch_a=int(arch_a or 0),
            arch_b=int(arch_b or 0),
        )
        old = flags.get(pair)
        if old is not None:
            new = PairFlags(
                bio_one=old.bio_one | new.bio_one,
                bio_both=old.bio_both | new.bio_both,
                arch_a=old.arch_a | new.arch_a,
                arch_b=old.arch_b | new.arch_b,
            )
        flags[pair] = new
    return flags


def flags_from_mentions(mention_flags: MentionFlags, pairs) -> dict:
    """Pair-level flags recomputed from gazetteer mentions."""
    out = {}
    for pair in pairs:
        a, b = pair
        out[pair] = PairFlags(
            bio_one=mention_flags.flag(a, b, "bio_one"),
            bio_both=mention_flags.flag(a, b, "bio_both"),
            arch_a=mention_flags.flag(a, b, "archive_of_a"),
            arch_b=mention_flags.flag(a, b, "archive_of_b"),
        )
    return out


def attach_annotations(
    dataset: ExpandedDataset,
    records: list[AnnotationRecord],
    flag_map: dict | None = None,
) -> tuple[ExpandedDataset, list[AnnotationRecord]]:
    """Join annotation records onto rows by (unordered pair, shared subject).

    Returns the annotated dataset plus the orphan records that matched no
    row. When no flag map is given it is built from the records themselves
    (annotation-column mode).
    """
    if flag_map is None:
        flag_map = build_flag_map(records)
    by_key = {}
    for rec in records:
        key = (canonical_pair(rec.art_hist_1, rec.art_hist_2), rec.shared_subject)
        by_key[key] = rec
    matched = set()
    rows = []
    for row in dataset.rows:
        key = (row.pair, row.shared_subject)
        rec = by_key.get(key)
        if rec is not None:
            matched.add(key)
        rows.append(
            replace(row, annotation=rec, flags=flag_map.get(row.pair, PairFlags()))
        )
    orphans = [rec for key, rec in sorted(by_key.items()) if key not in matched]
    return (
        ExpandedDataset(table=dataset.table, rows=tuple(rows), store_hash=dataset.store_hash),
        orphans,
    )


def require_annotations(dataset: ExpandedDataset) -> None:
    missing = [row.sort_key for row in dataset.rows if row.annotation is None]
    if missing:
        raise IncompleteDataError(
            f"{len(missing)} rows lack annotations",
            {"rows": missing[:20]},
        )


def to_annotation_records(dataset: ExpandedDataset) -> list[AnnotationRecord]:
    """Render an expanded dataset in the annotation-table schema for export."""
    out = []
    for row in dataset.rows:
        if row.annotation is not None:
            out.append(row.annotation)
            continue
        if dataset.table == TABLE_INSTITUTIONS:
            out.append(
                AnnotationRecord(
                    table=TABLE_INSTITUTIONS,
                    art_hist_1=row.pair[0],
                    art_hist_2=row.pair[1],
                    shared_subject=row.shared_subject,
                    relation_exists=0.0,
                )
            )
        else:
            out.append(
                AnnotationRecord(
                    table=TABLE_TOPICS,
                    art_hist_1=row.pair[0],
                    art_hist_2=row.pair[1],
                    shared_subject=row.shared_subject,
                    relation_exists=0.0,
                    recorded_in_one_bio=float(row.flags.bio_one),
                    recorded_in_both_bios=float(row.flags.bio_both),
                    collaborated_on_subject=0.0,
                    h2_relevant_to_h1_archive=0.0,
                    h2_mentioned_in_h1_archive=float(row.flags.arch_a),
                    h1_relevant_to_h2_archive=0.0,
                    h1_mentioned_in_h2_archive=float(row.flags.arch_b),
                )
            )
    return out
