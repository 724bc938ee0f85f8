"""One shared pipeline behind both the CLI and the HTTP service.

The engine owns the store, the annotated expansion tables, trained models,
and the decision log, so both entry points produce identical artifacts for
identical state and seed.
"""

import threading
from pathlib import Path

from .config import RunConfig
from .errors import NotFoundError, ParameterError
from .eda import EdaReport, build_report, network_export
from .evaluation import GridReport, evaluate_grid, select_model
from .expansion import (
    ExpandedDataset,
    attach_annotations,
    build_flag_map,
    expand_institution_pairs,
    expand_topic_pairs,
    flags_from_mentions,
    merge_tables,
)
from .features import (
    COLLECTION_SPECS,
    HISTORIAN_SPECS,
    FeatureSpec,
    build_features,
)
from .ingest import DumpManifest, load_dump
from .mentions import MentionFlags, build_alias_index
from .models import MODEL_KINDS, train
from .recommend import (
    Decision,
    DecisionLog,
    PairContext,
    apply_rules,
    build_pair_contexts,
    partition_known_unknown,
    rank,
    record_decision,
    score_candidates,
)
from .store import Store, canonical_pair


class Engine:
    def __init__(self, store: Store, config: RunConfig, decision_log_path: str | Path | None = None):
        self.store = store
        self.config = config
        self.topics: ExpandedDataset | None = None
        self.institutions: ExpandedDataset | None = None
        self.merged: ExpandedDataset | None = None
        self.orphans: list = []
        self.ambiguities: list = []
        self.decision_log = DecisionLog(decision_log_path or Path("decisions.jsonl"))
        self._models: dict = {}
        self._grids: dict = {}
        self._write_lock = threading.RLock()

    # -- construction --------------------------------------------------------

    @classmethod
    def from_manifest(
        cls,
        manifest: DumpManifest | str | Path,
        config: RunConfig | None = None,
        decision_log_path: str | Path | None = None,
    ) -> "Engine":
        if not isinstance(manifest, DumpManifest):
            manifest = DumpManifest.load(manifest)
        store = Store()
        loaded = load_dump(store, manifest)
        engine = cls(store, config or RunConfig(), decision_log_path)
        engine.ingest_summary = loaded
        engine.expand(loaded["annotations"])
        engine.replay_decisions()
        return engine

    def expand(self, annotations: dict) -> None:
        """Run expansion and join the annotation tables on."""
        topics = expand_topic_pairs(self.store)
        insts = expand_institution_pairs(self.store)
        topic_records = annotations.get("artists_periods", [])
        inst_records = annotations.get("institutions", [])
        if self.config.recommend.flag_source == "mentions":
            flags = MentionFlags(self.store, build_alias_index(self.store))
            self.ambiguities = flags.ambiguities
            pair_ids = topics.unique_pairs() | insts.unique_pairs()
            flag_map = flags_from_mentions(flags, sorted(pair_ids))
        else:
            flag_map = build_flag_map(topic_records)
        self.topics, orphans_t = attach_annotations(topics, topic_records, flag_map)
        self.institutions, orphans_i = attach_annotations(insts, inst_records, flag_map)
        self.merged = merge_tables(self.topics, self.institutions)
        self.orphans = orphans_t + orphans_i
        self.flag_map = flag_map

    def replay_decisions(self) -> None:
        """Fold accepted decisions back into the store as statements."""
        from .store import Statement

        for (pair, predicate), label in self.decision_log.labels().items():
            if label == 1 and self.store.has_entity(pair[0]) and self.store.has_entity(pair[1]):
                self.store.add_statement(
                    Statement(pair[0], predicate, pair[1], "decisions", "decision")
                )

    # -- analysis -------------------------------------------------------------

    def eda_report(self) -> EdaReport:
        return build_report(self.store, self.topics, self.institutions, self.merged)

    def network(self, mode: str):
        dataset = self.topics if mode == "topics" else self.institutions
        return network_export(self.store, dataset, mode)

    def datasets_for_unit(self, unit: str) -> dict:
        specs = HISTORIAN_SPECS if unit == "historian_pair" else COLLECTION_SPECS
        out = {}
        for name in specs:
            spec = FeatureSpec.by_name(name)
            out[name] = build_features(self.topics, spec, unit, self.institutions)
        return out

    def grid(self, unit: str, seed: int | None = None) -> GridReport:
        config = self.config.learn
        if seed is not None and seed != config.seed:
            from dataclasses import replace

            config = replace(config, seed=seed)
        key = (unit, config.seed)
        if key not in self._grids:
            self._grids[key] = evaluate_grid(self.datasets_for_unit(unit), MODEL_KINDS, config)
        return self._grids[key]

    def train_model(self, spec_name: str, kind: str = "auto", unit: str = "historian_pair"):
        """Train one model; 'auto' picks the most precise kind for the spec."""
        spec = FeatureSpec.by_name(spec_name)
        data = build_features(self.topics, spec, unit, self.institutions)
        data = self._apply_decision_labels(data, unit)
        if kind == "auto":
            kind = select_model(self.grid(unit).column(spec_name))
        if kind not in MODEL_KINDS:
            raise ParameterError(f"unknown model kind {kind!r}")
        model = train(kind, data, self.config.learn)
        with self._write_lock:
            self._models[(unit, spec_name, kind)] = model
        return model

    def _apply_decision_labels(self, data, unit: str):
        """Reviewer verdicts override gold labels for retraining."""
        import numpy as np

        labels = self.decision_log.labels()
        if not labels:
            return data
        predicate = "interacted_with" if unit == "historian_pair" else "is_related_to"
        y = data.y.copy()
        for i, pair in enumerate(data.pairs):
            override = labels.get((pair, predicate))
            if override is not None:
                y[i] = override
        from .features import LabeledDataset

        return LabeledDataset(unit=data.unit, spec=data.spec, pairs=data.pairs, X=data.X, y=y)

    # -- recommendations --------------------------------------------------------

    def default_spec(self, unit: str) -> tuple[str, str]:
        """Configured or precision-first (spec, kind) choice for a unit."""
        cfg = self.config.recommend
        if unit == "collection_pair":
            spec_name = cfg.collection_spec
            grid = self.grid(unit)
            kind = cfg.model if cfg.model != "auto" else select_model(grid.column(spec_name))
            return spec_name, kind
        if cfg.historian_spec != "auto":
            spec_name = cfg.historian_spec
            kind = cfg.model if cfg.model != "auto" else select_model(self.grid(unit).column(spec_name))
            return spec_name, kind
        # precision-first among specs whose predictions reach unknown pairs
        grid = self.grid(unit)
        contexts = self.pair_contexts()
        best = None
        for spec_name in grid.spec_names():
            column = grid.column(spec_name)
            if not column:
                continue
            kind = select_model(column)
            model = train(
                kind,
                self._apply_decision_labels(
                    build_features(
                        self.topics, FeatureSpec.by_name(spec_name), unit, self.institutions
                    ),
                    unit,
                ),
                self.config.learn,
            )
            rules = apply_rules(contexts, self.store)
            recs = score_candidates(model, contexts, unit, rules, self.store)
            part = partition_known_unknown(recs)
            if part["unknown_pct"] is None or part["unknown_pct"] == 0:
                continue
            p1 = column[kind].p1
            if best is None or p1 > best[0]:
                best = (p1, spec_name, kind)
        if best is None:
            return "inst", select_model(grid.column("inst"))
        return best[1], best[2]

    def pair_contexts(self) -> dict:
        return build_pair_contexts(self.topics, self.institutions)

    def recommendations(
        self,
        entity_id: str | None = None,
        limit: int | None = None,
        include_decided: bool = False,
    ) -> list:
        """Ranked recommendations, optionally filtered to one entity."""
        if entity_id is not None and not self.store.has_entity(entity_id):
            raise NotFoundError(f"unknown entity {entity_id!r}", {"id": entity_id})
        contexts = self.pair_contexts()
        rules = apply_rules(contexts, self.store)
        unit = "historian_pair"
        if entity_id is not None and self.store.entity(entity_id).kind == "collection":
            unit = "collection_pair"
        spec_name, kind = self.default_spec(unit)
        model = self._models.get((unit, spec_name, kind))
        if model is None:
            model = self.train_model(spec_name, kind, unit)
        model_recs = score_candidates(model, contexts, unit, rules, self.store)
        recs = rules + model_recs
        if entity_id is not None:
            recs = [r for r in recs if entity_id in r.pair]
        if not include_decided:
            decided = set(self.decision_log.labels())
            recs = [
                r
                for r in recs
                if (r.pair, r.predicate) not in decided
                and not self.store.has_statement(r.pair[0], r.predicate, r.pair[1])
            ]
        recs = rank(recs)
        return recs[:limit] if limit else recs

    def partition(self, unit: str, spec_name: str, kind: str | None = None) -> dict:
        """Known/unknown split of one spec's positive predictions."""
        grid = self.grid(unit)
        if kind is None:
            kind = select_model(grid.column(spec_name))
        data = build_features(
            self.topics, FeatureSpec.by_name(spec_name), unit, self.institutions
        )
        model = train(kind, data, self.config.learn)
        contexts = self.pair_contexts()
        candidates = {pair: contexts[pair] for pair in data.pairs if pair in contexts}
        from .models import predict_batch

        y_pred, _ = predict_batch(model, data.X)
        positive = [
            candidates[pair]
            for pair, pred in zip(data.pairs, y_pred)
            if pred == 1 and pair in candidates
        ]
        recs = [
            # partitioning is over positive predictions, before rule precedence
            _bare_rec(ctx)
            for ctx in positive
        ]
        result = partition_known_unknown(recs)
        result["model"] = kind
        result["spec"] = spec_name
        return result

    def record(self, decision: Decision, known_recs: dict | None = None) -> bool:
        with self._write_lock:
            return record_decision(self.decision_log, self.store, decision, known_recs)


def _bare_rec(ctx: PairContext):
    from .recommend import Evidence, Recommendation

    return Recommendation(
        pair=ctx.pair,
        predicate="interacted_with",
        score=1.0,
        source="model",
        known=ctx.flags.bio_one,
        evidence=(Evidence("shared_topic", ctx.shared_topics or ctx.pair),),
    )
