import random

import pytest

from archlink.errors import (
    ConflictError,
    InvalidPairError,
    NotFoundError,
    ReferentialError,
    VocabularyError,
)
from archlink.store import Entity, Statement, Store, canonical_pair


def test_add_entity_then_lookup(f1_store):
    ent = f1_store.entity("H1")
    assert ent.label == "Amalia Ferro"
    assert ent.kind == "historian"


def test_add_entity_idempotent(f1_store):
    before = f1_store.counts()["entities"]
    f1_store.add_entity(Entity(id="H1", kind="historian", label="Amalia Ferro"))
    assert f1_store.counts()["entities"] == before


def test_add_entity_conflicting_label(f1_store):
    with pytest.raises(ConflictError):
        f1_store.add_entity(Entity(id="H1", kind="historian", label="Someone Else"))


def test_add_statement_requires_entities(f1_store):
    with pytest.raises(ReferentialError):
        f1_store.add_statement(Statement("H1", "subject", "T9", "g1"))


def test_add_statement_dedup(f1_store):
    stmt = Statement("H3", "subject", "T1", "g1")
    assert f1_store.add_statement(stmt) is True
    assert f1_store.add_statement(stmt) is False
    assert sum(1 for s in f1_store.statements() if s.key == stmt.key) == 1


def test_unknown_predicate_rejected():
    with pytest.raises(VocabularyError):
        Statement("H1", "likes", "T1", "g1")


def test_objects_of_kind_filter(f1_store):
    assert f1_store.objects_of("H1", "subject", "topic") == {"T1"}
    assert f1_store.objects_of("H1", "subject", "institution") == {"I1"}
    assert f1_store.objects_of("H2", "subject", "institution") == {"I1"}


def test_objects_of_empty_and_unknown(f1_store):
    f1_store.add_entity(Entity(id="H9", kind="historian", label="Nils Odeberg"))
    assert f1_store.objects_of("H9", "subject") == set()
    with pytest.raises(NotFoundError):
        f1_store.objects_of("H404", "subject")


def test_shared_objects_on_f1(f1_store):
    assert f1_store.shared_objects("H1", "H2", "subject", "topic") == {"T1"}
    assert f1_store.shared_objects("H1", "H3", "subject", "institution") == set()
    # symmetric in the two arguments
    assert f1_store.shared_objects("H2", "H1", "subject", "topic") == {"T1"}
    with pytest.raises(InvalidPairError):
        f1_store.shared_objects("H1", "H1", "subject", "topic")


def test_canonical_pair():
    assert canonical_pair("H2", "H1") == ("H1", "H2")
    assert canonical_pair("H1", "H2") == ("H1", "H2")
    with pytest.raises(InvalidPairError):
        canonical_pair("H1", "H1")


def test_symmetric_statement_lookup(f1_store):
    f1_store.add_statement(Statement("H1", "interacted_with", "H2", "g2"))
    assert f1_store.has_statement("H1", "interacted_with", "H2")
    assert f1_store.has_statement("H2", "interacted_with", "H1")
    # directional predicates do not flip
    assert f1_store.has_statement("H1", "subject", "T1")
    assert not f1_store.has_statement("T1", "subject", "H1")


def test_referential_integrity_scan(f1_store):
    assert f1_store.check_referential_integrity() == []


def test_objects_of_matches_bruteforce_on_random_stores():
    rng = random.Random(7)
    for _ in range(25):
        store = Store()
        n_hist, n_top = rng.randint(1, 6), rng.randint(1, 6)
        hists = [f"h{i}" for i in range(n_hist)]
        tops = [f"t{i}" for i in range(n_top)]
        for h in hists:
            store.add_entity(Entity(id=h, kind="historian", label=h.upper()))
        for t in tops:
            store.add_entity(Entity(id=t, kind="topic", label=t.upper()))
        stmts = []
        for h in hists:
            for t in tops:
                if rng.random() < 0.4:
                    g = rng.choice(["g1", "g2"])
                    store.add_statement(Statement(h, "subject", t, g))
                    stmts.append((h, "subject", t, g))
        for h in hists:
            expected = {o for (s, p, o, _) in stmts if s == h and p == "subject"}
            assert store.objects_of(h, "subject") == expected


def test_content_hash_tracks_content(f1_store):
    h1 = f1_store.content_hash()
    assert h1 == f1_store.content_hash()
    f1_store.add_statement(Statement("H3", "subject", "T1", "g9"))
    assert f1_store.content_hash() != h1
