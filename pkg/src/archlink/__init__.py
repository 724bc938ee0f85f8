"""archlink: relation discovery and review recommendations for archival
linked-data catalogues."""

from .config import LearnConfig, RecommendConfig, RunConfig
from .engine import Engine
from .store import Entity, Statement, Store, TextRecord, canonical_pair

__version__ = "0.1.0"

__all__ = [
    "Engine",
    "Entity",
    "LearnConfig",
    "RecommendConfig",
    "RunConfig",
    "Statement",
    "Store",
    "TextRecord",
    "canonical_pair",
    "__version__",
]
