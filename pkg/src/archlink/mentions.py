"""Gazetteer mention detection over biographies and collection descriptions.

Matching is deterministic: catalogue labels and aliases are normalized
(case folded, diacritics stripped, punctuation treated as a word boundary)
and texts are scanned left to right taking the longest match on word
boundaries. Aliases claimed by several entities never produce a mention;
they are logged instead, keeping detected mentions precise.
"""

import json
import unicodedata
from dataclasses import dataclass
from pathlib import Path

from .errors import NotFoundError
from .store import Store, TextRecord


@dataclass(frozen=True)
class Mention:
    entity_id: str
    host_entity: str
    field: str
    span: tuple[int, int]
    surface: str


@dataclass(frozen=True)
class AmbiguityEvent:
    host_entity: str
    surface: str
    candidate_ids: tuple[str, ...]


@dataclass(frozen=True)
class AliasIndex:
    keys: dict  # normalized alias -> frozenset of entity ids
    max_tokens: int

    def lookup(self, norm: str) -> frozenset | None:
        return self.keys.get(norm)


def normalize_surface(text: str) -> str:
    """Normalization used for both alias keys and scanned text spans."""
    return " ".join(tok for tok, _, _ in _tokenize(text))


def build_alias_index(store: Store) -> AliasIndex:
    """Index every entity label and alias under its normalized form."""
    keys: dict[str, set] = {}
    max_tokens = 1
    for ent in store.entities():
        for surface in (ent.label, *ent.aliases):
            norm = normalize_surface(surface)
            if not norm:
                continue
            keys.setdefault(norm, set()).add(ent.id)
            max_tokens = max(max_tokens, norm.count(" ") + 1)
    return AliasIndex(
        keys={k: frozenset(v) for k, v in keys.items()},
        max_tokens=max_tokens,
    )


def find_mentions(
    record: TextRecord,
    index: AliasIndex,
    ambiguities: list | None = None,
) -> list[Mention]:
    """Longest-match, non-overlapping scan of one text record.

    Ambiguous keys (several candidate entities) yield no Mention; when an
    `ambiguities` list is passed, an AmbiguityEvent is appended for each.
    Mentions of the host entity in its own record are dropped.
    """
    tokens = _tokenize(record.text)
    mentions = []
    i = 0
    while i < len(tokens):
        match = None
        for n in range(min(index.max_tokens, len(tokens) - i), 0, -1):
            norm = " ".join(tok for tok, _, _ in tokens[i : i + n])
            candidates = index.lookup(norm)
            if candidates:
                match = (n, candidates)
                break
        if match is None:
            i += 1
            continue
        n, candidates = match
        start = tokens[i][1]
        end = tokens[i + n - 1][2]
        surface = record.text[start:end]
        if len(candidates) > 1:
            if ambiguities is not None:
                ambiguities.append(
                    AmbiguityEvent(record.entity_id, surface, tuple(sorted(candidates)))
                )
        else:
            (entity_id,) = candidates
            if entity_id != record.entity_id:
                mentions.append(
                    Mention(
                        entity_id=entity_id,
                        host_entity=record.entity_id,
                        field=record.field,
                        span=(start, end),
                        surface=surface,
                    )
                )
        i += n
    return mentions


class MentionFlags:
    """Pair-level mention flags computed from all texts in a store."""

    def __init__(self, store: Store, index: AliasIndex | None = None):
        self._store = store
        index = index or build_alias_index(store)
        self.ambiguities: list[AmbiguityEvent] = []
        self.mentions: list[Mention] = []
        for record in store.texts():
            self.mentions.extend(find_mentions(record, index, self.ambiguities))
        # (host, field) -> set of mentioned entity ids
        self._mentioned: dict[tuple[str, str], set] = {}
        for m in self.mentions:
            self._mentioned.setdefault((m.host_entity, m.field), set()).add(m.entity_id)

    def _in_bio(self, host: str, other: str) -> bool:
        return other in self._mentioned.get((host, "biography"), ())

    def _in_archive_of(self, producer: str, other: str) -> bool:
        collections = self._store.objects_of(producer, "produced", "collection")
        for coll in self._store.entities("collection"):
            if producer in self._store.objects_of(coll.id, "produced_by", "historian"):
                collections.add(coll.id)
        return any(other in self._mentioned.get((c, "description"), ()) for c in collections)

    def flag(self, h_a: str, h_b: str, scope: str) -> int:
        """Binary mention flag for a pair under one of the defined scopes."""
        for h in (h_a, h_b):
            if not self._store.has_entity(h):
                raise NotFoundError(f"unknown historian {h!r}", {"id": h})
        if scope == "bio_one":
            return int(self._in_bio(h_a, h_b) or self._in_bio(h_b, h_a))
        if scope == "bio_both":
            return int(self._in_bio(h_a, h_b) and self._in_bio(h_b, h_a))
        if scope == "archive_of_a":
            return int(self._in_archive_of(h_a, h_b))
        if scope == "archive_of_b":
            return int(self._in_archive_of(h_b, h_a))
        if scope == "any":
            return int(
                self.flag(h_a, h_b, "bio_one")
                or self.flag(h_a, h_b, "archive_of_a")
                or self.flag(h_a, h_b, "archive_of_b")
            )
        raise NotFoundError(f"unknown mention scope {scope!r}")


def write_ambiguity_log(events: list[AmbiguityEvent], path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for ev in events:
            fh.write(
                json.dumps(
                    {
                        "host_entity": ev.host_entity,
                        "surface": ev.surface,
                        "candidate_ids": list(ev.candidate_ids),
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def _tokenize(text: str) -> list[tuple[str, int, int]]:
    """Word tokens with original character spans; punctuation splits tokens."""
    tokens = []
    start = None
    norm_chars: list[str] = []
    for i, ch in enumerate(text):
        if ch.isalnum():
            if start is None:
                start = i
            norm_chars.append(ch)
        else:
            if start is not None:
                tokens.append((_fold("".join(norm_chars)), start, i))
                start = None
                norm_chars = []
    if start is not None:
        tokens.append((_fold("".join(norm_chars)), start, len(text)))
    return [t for t in tokens if t[0]]


def _fold(token: str) -> str:
    decomposed = unicodedata.normalize("NFKD", token.casefold())
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch))
