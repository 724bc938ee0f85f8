"""Rule-based and model-based recommendations, known/unknown partition,
and the append-only decision log.

Deterministic rules run first and always win: a mention in a biography or
an archive is treated as ground truth (score 1.0), and the classifier only
covers candidates no rule fired on.
"""

import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from .errors import NotFoundError
from .expansion import ExpandedDataset, PairFlags
from .store import Store, canonical_pair

RULE_IDS = ("R1_bio_mention", "R2_arch_mention", "R3_materials")


@dataclass(frozen=True)
class Evidence:
    type: str  # bio_mention | arch_mention | shared_topic | shared_institution
    entities: tuple[str, ...]

    def as_dict(self) -> dict:
        return {"type": self.type, "entities": list(self.entities)}


@dataclass(frozen=True)
class Recommendation:
    pair: tuple[str, str]
    predicate: str
    score: float
    source: str  # "rule:R1_bio_mention" or "model:nb/inst"
    known: int
    evidence: tuple[Evidence, ...]

    @property
    def id(self) -> str:
        digest = hashlib.sha1(
            "|".join((self.pair[0], self.pair[1], self.predicate)).encode()
        ).hexdigest()
        return f"rec-{digest[:12]}"

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "pair": list(self.pair),
            "predicate": self.predicate,
            "score": self.score,
            "source": self.source,
            "known": self.known,
            "evidence": [e.as_dict() for e in self.evidence],
        }


@dataclass(frozen=True)
class PairContext:
    """Everything the rules and the ranker need to know about one pair."""

    pair: tuple[str, str]
    flags: PairFlags = field(default=PairFlags())
    relevance_a: int = 0  # archive of pair[0] holds materials on pair[1] (A8/A10)
    relevance_b: int = 0
    shared_topics: tuple[str, ...] = ()
    shared_institutions: tuple[str, ...] = ()


def build_pair_contexts(
    topics: ExpandedDataset | None,
    institutions: ExpandedDataset | None = None,
) -> dict:
    """Aggregate annotated rows into per-pair contexts."""
    contexts: dict[tuple, dict] = {}

    def slot(pair):
        return contexts.setdefault(
            pair,
            {"flags": PairFlags(), "rel_a": 0, "rel_b": 0, "topics": [], "insts": []},
        )

    if topics is not None:
        for row in topics.rows:
            c = slot(row.pair)
            c["flags"] = row.flags
            c["topics"].append(row.shared_subject)
            rec = row.annotation
            if rec is None:
                continue
            # A8 speaks about art_hist_1's archive; map onto canonical order
            rel_1 = int((rec.h2_relevant_to_h1_archive or 0) == 1)
            rel_2 = int((rec.h1_relevant_to_h2_archive or 0) == 1)
            if row.pair[0] == rec.art_hist_1:
                rel_a, rel_b = rel_1, rel_2
            else:
                rel_a, rel_b = rel_2, rel_1
            c["rel_a"] |= rel_a
            c["rel_b"] |= rel_b
    if institutions is not None:
        for row in institutions.rows:
            c = slot(row.pair)
            if not c["topics"]:
                c["flags"] = row.flags
            c["insts"].append(row.shared_subject)
    return {
        pair: PairContext(
            pair=pair,
            flags=c["flags"],
            relevance_a=c["rel_a"],
            relevance_b=c["rel_b"],
            shared_topics=tuple(sorted(c["topics"])),
            shared_institutions=tuple(sorted(c["insts"])),
        )
        for pair, c in contexts.items()
    }


def _collections_of(store: Store, historian: str) -> list[str]:
    produced = store.objects_of(historian, "produced", "collection")
    for coll in store.entities("collection"):
        if historian in store.objects_of(coll.id, "produced_by", "historian"):
            produced.add(coll.id)
    return sorted(produced)


def apply_rules(contexts: dict, store: Store | None = None) -> list[Recommendation]:
    """Fire the deterministic rules over pair contexts.

    R1: a biography mention implies an interaction. R2: an archive mention
    implies an interaction, plus a directional materials link from the
    mentioning collection when the store can resolve it. R3: annotated
    archive relevance implies an interaction. All scores are 1.0.
    """
    recs: dict[tuple, Recommendation] = {}

    def add(rec: Recommendation):
        recs.setdefault((rec.pair, rec.predicate), rec)

    for pair in sorted(contexts):
        ctx = contexts[pair]
        a, b = pair
        if ctx.flags.bio_one:
            add(
                Recommendation(
                    pair=pair,
                    predicate="interacted_with",
                    score=1.0,
                    source="rule:R1_bio_mention",
                    known=1,
                    evidence=(Evidence("bio_mention", pair),),
                )
            )
        for host, other, flagged in ((a, b, ctx.flags.arch_a), (b, a, ctx.flags.arch_b)):
            if not flagged:
                continue
            add(
                Recommendation(
                    pair=pair,
                    predicate="interacted_with",
                    score=1.0,
                    source="rule:R2_arch_mention",
                    known=ctx.flags.bio_one,
                    evidence=(Evidence("arch_mention", (host, other)),),
                )
            )
            if store is not None:
                for coll in _collections_of(store, host):
                    add(
                        Recommendation(
                            pair=(coll, other),
                            predicate="includes_materials_relevant_to",
                            score=1.0,
                            source="rule:R2_arch_mention",
                            known=ctx.flags.bio_one,
                            evidence=(Evidence("arch_mention", (host, other)),),
                        )
                    )
        if ctx.relevance_a or ctx.relevance_b:
            add(
                Recommendation(
                    pair=pair,
                    predicate="interacted_with",
                    score=1.0,
                    source="rule:R3_materials",
                    known=ctx.flags.bio_one,
                    evidence=(Evidence("arch_mention", pair),),
                )
            )
    return [recs[key] for key in sorted(recs)]


def score_candidates(
    model,
    contexts: dict,
    unit: str = "historian_pair",
    rule_recs: list[Recommendation] | None = None,
    store: Store | None = None,
) -> list[Recommendation]:
    """Model recommendations for pairs no rule already covered.

    Candidates predicted positive become recommendations carrying the model
    score; historian pairs use the interaction predicate, collection pairs
    the symmetric relatedness predicate.
    """
    from .models import predict

    predicate = "interacted_with" if unit == "historian_pair" else "is_related_to"
    covered = {
        (rec.pair, rec.predicate) for rec in (rule_recs or []) if rec.score == 1.0
    }
    out = []
    for pair in sorted(contexts):
        ctx = contexts[pair]
        x = _vector_for(model.spec, ctx)
        pred = predict(model, x)
        if pred.label != 1:
            continue
        evidence = _context_evidence(ctx)
        if not evidence:
            continue
        if unit == "collection_pair":
            if store is None:
                continue
            colls_a = _collections_of(store, pair[0])
            colls_b = _collections_of(store, pair[1])
            if not colls_a or not colls_b:
                continue
            targets = [canonical_pair(ca, cb) for ca in colls_a for cb in colls_b]
        else:
            targets = [pair]
        for target in targets:
            if (target, predicate) in covered:
                continue
            out.append(
                Recommendation(
                    pair=target,
                    predicate=predicate,
                    score=pred.score,
                    source=f"model:{model.kind}/{model.spec.name}",
                    known=ctx.flags.bio_one,
                    evidence=evidence,
                )
            )
    return out


def _vector_for(spec, ctx: PairContext):
    values = []
    for feature in spec.features:
        if feature == "bio_mention":
            values.append(float(ctx.flags.bio_one))
        elif feature == "arch_mention":
            values.append(float(ctx.flags.arch_any))
        elif feature == "n_shared_topics":
            values.append(float(len(ctx.shared_topics)))
        else:
            values.append(float(len(ctx.shared_institutions)))
    return values


def _context_evidence(ctx: PairContext) -> tuple[Evidence, ...]:
    evidence = []
    if ctx.flags.bio_one:
        evidence.append(Evidence("bio_mention", ctx.pair))
    if ctx.flags.arch_any:
        evidence.append(Evidence("arch_mention", ctx.pair))
    if ctx.shared_topics:
        evidence.append(Evidence("shared_topic", ctx.shared_topics))
    if ctx.shared_institutions:
        evidence.append(Evidence("shared_institution", ctx.shared_institutions))
    return tuple(evidence)


def partition_known_unknown(recs: list[Recommendation]) -> dict:
    """Split recommendations on the biography-mention flag.

    Percentages are integers summing to 100; a rounded half resolves toward
    the known share. Empty input reports n/a.
    """
    known = [r for r in recs if r.known]
    unknown = [r for r in recs if not r.known]
    if not recs:
        return {"known_pct": None, "unknown_pct": None, "known": [], "unknown": []}
    fraction = 100.0 * len(known) / len(recs)
    known_pct = int(fraction) + (1 if fraction - int(fraction) >= 0.5 else 0)
    return {
        "known_pct": known_pct,
        "unknown_pct": 100 - known_pct,
        "known": known,
        "unknown": unknown,
    }


def rank(recs: list[Recommendation]) -> list[Recommendation]:
    """Total order; score descending, canonical pair ascending on ties."""
    return sorted(recs, key=lambda r: (-r.score, r.pair, r.predicate))


# -- decisions ---------------------------------------------------------------


@dataclass(frozen=True)
class Decision:
    rec_id: str
    pair: tuple[str, str]
    predicate: str
    verdict: str  # accept | reject
    reviewer: str
    timestamp: float
    request_id: str | None = None


class DecisionLog:
    """Append-only JSONL log of reviewer decisions.

    Replays are idempotent: rebuilding the label map twice gives identical
    results, and a repeated request identifier is recorded once.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._request_ids = {d.request_id for d in self.decisions() if d.request_id}

    def decisions(self) -> list[Decision]:
        if not self.path.exists():
            return []
        out = []
        with self.path.open(encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                doc = json.loads(line)
                out.append(
                    Decision(
                        rec_id=doc["rec_id"],
                        pair=tuple(doc["pair"]),
                        predicate=doc["predicate"],
                        verdict=doc["verdict"],
                        reviewer=doc["reviewer"],
                        timestamp=doc["timestamp"],
                        request_id=doc.get("request_id"),
                    )
                )
        return out

    def append(self, decision: Decision) -> bool:
        """Write one decision; returns False for a replayed request id."""
        if decision.request_id and decision.request_id in self._request_ids:
            return False
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(
                json.dumps(
                    {
                        "rec_id": decision.rec_id,
                        "pair": list(decision.pair),
                        "predicate": decision.predicate,
                        "verdict": decision.verdict,
                        "reviewer": decision.reviewer,
                        "timestamp": decision.timestamp,
                        "request_id": decision.request_id,
                    }
                )
                + "\n"
            )
            fh.flush()
        if decision.request_id:
            self._request_ids.add(decision.request_id)
        return True

    def labels(self) -> dict:
        """Latest verdict per (pair, predicate), as training labels."""
        out = {}
        for d in self.decisions():
            out[(d.pair, d.predicate)] = 1 if d.verdict == "accept" else 0
        return out

    def latest_by_reviewer(self) -> dict:
        out = {}
        for d in self.decisions():
            out[(d.pair, d.predicate, d.reviewer)] = d
        return out


def record_decision(
    log: DecisionLog,
    store: Store,
    decision: Decision,
    known_recs: dict | None = None,
) -> bool:
    """Append a decision; accepting materializes a catalogue statement.

    When a map of recommendation ids is supplied, the reference must
    resolve. Returns False when the request id was already processed.
    """
    if known_recs is not None and decision.rec_id not in known_recs:
        raise NotFoundError(
            f"unknown recommendation {decision.rec_id!r}", {"rec_id": decision.rec_id}
        )
    if decision.verdict not in ("accept", "reject"):
        raise NotFoundError(f"unknown verdict {decision.verdict!r}")
    appended = log.append(decision)
    if appended and decision.verdict == "accept":
        from .store import Statement

        store.add_statement(
            Statement(
                subject=decision.pair[0],
                predicate=decision.predicate,
                object=decision.pair[1],
                graph="decisions",
                source="decision",
            )
        )
    return appended


def new_decision(
    rec: Recommendation,
    verdict: str,
    reviewer: str,
    request_id: str | None = None,
    timestamp: float | None = None,
) -> Decision:
    return Decision(
        rec_id=rec.id,
        pair=rec.pair,
        predicate=rec.predicate,
        verdict=verdict,
        reviewer=reviewer,
        timestamp=time.time() if timestamp is None else timestamp,
        request_id=request_id,
    )
