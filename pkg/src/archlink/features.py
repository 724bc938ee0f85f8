"""Feature construction: candidate pairs to numeric vectors and labels.

Classification works on unique pairs, not per-subject rows; labels aggregate
a pair's rows with logical OR. Historian pairs are labelled by the
relation-exists annotation, collection pairs by archive relevance.
"""

from dataclasses import dataclass

import numpy as np

from .errors import MissingInputError, ParameterError
from .expansion import ExpandedDataset, PairFlags, require_annotations

# feature id -> value type; counts get Gaussian likelihoods in naive Bayes
FEATURE_TYPES = {
    "bio_mention": "binary",
    "arch_mention": "binary",
    "n_shared_topics": "count",
    "n_shared_institutions": "count",
}

_SPEC_FEATURES = {
    "bio": ("bio_mention",),
    "arch_desc": ("arch_mention",),
    "bio+arch_desc": ("bio_mention", "arch_mention"),
    "topics": ("n_shared_topics",),
    "topics+bio": ("n_shared_topics", "bio_mention"),
    "topics+arch_desc": ("n_shared_topics", "arch_mention"),
    "topics+bio+arch_desc": ("n_shared_topics", "bio_mention", "arch_mention"),
    "inst": ("n_shared_institutions",),
    "inst+topics": ("n_shared_institutions", "n_shared_topics"),
}

HISTORIAN_SPECS = tuple(_SPEC_FEATURES)
COLLECTION_SPECS = ("bio", "topics", "topics+bio", "inst", "inst+topics")

UNITS = ("historian_pair", "collection_pair")


@dataclass(frozen=True)
class FeatureSpec:
    name: str
    features: tuple[str, ...]

    @classmethod
    def by_name(cls, name: str) -> "FeatureSpec":
        try:
            return cls(name=name, features=_SPEC_FEATURES[name])
        except KeyError:
            raise ParameterError(f"unknown feature spec {name!r}") from None

    @property
    def needs_institutions(self) -> bool:
        return "n_shared_institutions" in self.features

    def feature_types(self) -> tuple[str, ...]:
        return tuple(FEATURE_TYPES[f] for f in self.features)


@dataclass(frozen=True)
class LabeledDataset:
    unit: str
    spec: FeatureSpec
    pairs: tuple[tuple[str, str], ...]
    X: np.ndarray  # shape (n_pairs, n_features)
    y: np.ndarray  # shape (n_pairs,), values in {0, 1}

    def __len__(self) -> int:
        return len(self.pairs)


def build_features(
    topics: ExpandedDataset | None,
    spec: FeatureSpec,
    unit: str,
    institutions: ExpandedDataset | None = None,
) -> LabeledDataset:
    """Build one row per unique pair of the spec's base table.

    Specs built on institution features take their pairs from the
    institutions table; all others use the topics table. Counts default to
    zero for pairs absent from the other table.
    """
    if unit not in UNITS:
        raise ParameterError(f"unknown unit {unit!r}")
    if spec.needs_institutions and institutions is None:
        raise MissingInputError(f"spec {spec.name!r} needs the institutions table")
    base = institutions if spec.name.startswith("inst") else topics
    if base is None:
        raise MissingInputError(f"spec {spec.name!r} needs the topics table")
    require_annotations(base)

    topic_counts = _pair_row_counts(topics)
    inst_counts = _pair_row_counts(institutions)
    flags = _pair_flags(topics, institutions)
    validity = _pair_validity(base)
    relevance = _pair_relevance(topics)

    pairs = sorted(base.unique_pairs())
    vectors = []
    labels = []
    for pair in pairs:
        f = flags.get(pair, PairFlags())
        values = []
        for feature in spec.features:
            if feature == "bio_mention":
                values.append(float(f.bio_one))
            elif feature == "arch_mention":
                values.append(float(f.arch_any))
            elif feature == "n_shared_topics":
                values.append(float(topic_counts.get(pair, 0)))
            else:
                values.append(float(inst_counts.get(pair, 0)))
        vectors.append(values)
        if unit == "historian_pair":
            labels.append(validity.get(pair, 0))
        else:
            labels.append(relevance.get(pair, 0))
    return LabeledDataset(
        unit=unit,
        spec=spec,
        pairs=tuple(pairs),
        X=np.asarray(vectors, dtype=float).reshape(len(pairs), len(spec.features)),
        y=np.asarray(labels, dtype=int),
    )


def _pair_row_counts(dataset: ExpandedDataset | None) -> dict:
    counts: dict[tuple, int] = {}
    if dataset is not None:
        for row in dataset.rows:
            counts[row.pair] = counts.get(row.pair, 0) + 1
    return counts


def _pair_flags(*datasets: ExpandedDataset | None) -> dict:
    flags = {}
    for dataset in datasets:
        if dataset is None:
            continue
        for row in dataset.rows:
            flags.setdefault(row.pair, row.flags)
    return flags


def _pair_validity(dataset: ExpandedDataset) -> dict:
    valid: dict[tuple, int] = {}
    for row in dataset.rows:
        if row.annotation is None:
            continue
        flag = int(row.annotation.relation_exists == 1)
        valid[row.pair] = max(valid.get(row.pair, 0), flag)
    return valid


def _pair_relevance(topics: ExpandedDataset | None) -> dict:
    relevant: dict[tuple, int] = {}
    if topics is None:
        return relevant
    for row in topics.rows:
        rec = row.annotation
        if rec is None:
            continue
        flag = int(
            (rec.h2_relevant_to_h1_archive or 0) == 1
            or (rec.h1_relevant_to_h2_archive or 0) == 1
        )
        relevant[row.pair] = max(relevant.get(row.pair, 0), flag)
    return relevant
