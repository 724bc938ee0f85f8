"""Run configuration: classifier hyperparameters and recommender defaults."""

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ConfigurationError


@dataclass(frozen=True)
class LearnConfig:
    l2: float = 1.0  # logistic regression regularization strength
    tol: float = 1e-6  # gradient-norm stopping tolerance
    max_iter: int = 1000
    k: int = 5  # cross-validation folds
    seed: int = 13
    var_floor: float = 1e-9  # Gaussian variance floor for naive Bayes


@dataclass(frozen=True)
class RecommendConfig:
    historian_spec: str = "auto"  # "auto" picks by precision with unknown share > 0
    collection_spec: str = "bio"
    model: str = "auto"  # lr | nb | dt | auto (precision-first selection)
    flag_source: str = "annotations"  # annotations | mentions


@dataclass(frozen=True)
class RunConfig:
    learn: LearnConfig = field(default_factory=LearnConfig)
    recommend: RecommendConfig = field(default_factory=RecommendConfig)

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls.from_dict(doc)

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        def build(klass, section):
            known = {f.name for f in fields(klass)}
            unknown = set(section) - known
            if unknown:
                raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
            return klass(**section)

        return cls(
            learn=build(LearnConfig, doc.get("learn", {})),
            recommend=build(RecommendConfig, doc.get("recommend", {})),
        )

    def with_seed(self, seed: int) -> "RunConfig":
        from dataclasses import replace

        return RunConfig(learn=replace(self.learn, seed=seed), recommend=self.recommend)
