import pytest

from archlink.errors import NotFoundError
from archlink.mentions import (
    MentionFlags,
    build_alias_index,
    find_mentions,
    normalize_surface,
    write_ambiguity_log,
)
from archlink.store import Entity, Statement, Store, TextRecord

from conftest import make_f1_store


def historian(eid, label, aliases=()):
    return Entity(id=eid, kind="historian", label=label, aliases=tuple(aliases))


def test_index_contains_labels_and_aliases():
    store = Store()
    store.add_entity(historian("H1", "Federico Zanetti", aliases=["Zanetti"]))
    index = build_alias_index(store)
    assert index.lookup("federico zanetti") == frozenset({"H1"})
    assert index.lookup("zanetti") == frozenset({"H1"})


def test_alias_collision_keeps_both():
    store = Store()
    store.add_entity(historian("H1", "Federico Zanetti", aliases=["Zanetti"]))
    store.add_entity(Entity(id="C1", kind="collection", label="Zanetti Archive", aliases=("Zanetti",)))
    index = build_alias_index(store)
    assert index.lookup("zanetti") == frozenset({"H1", "C1"})


def test_empty_store_empty_index():
    index = build_alias_index(Store())
    assert index.keys == {}


def test_normalization_folds_case_diacritics_punctuation():
    assert normalize_surface("Fédérico  ZANETTI,") == "federico zanetti"
    assert normalize_surface("d'Arte") == "d arte"


def test_find_single_mention():
    store = Store()
    store.add_entity(historian("H1", "Amalia Ferro"))
    store.add_entity(historian("H2", "Roberto Longari"))
    store.set_text(TextRecord("H1", "biography", "She studied with Roberto Longari in Florence."))
    index = build_alias_index(store)
    mentions = find_mentions(store.text("H1", "biography"), index)
    assert len(mentions) == 1
    m = mentions[0]
    assert m.entity_id == "H2"
    assert m.surface == "Roberto Longari"
    assert store.text("H1", "biography").text[m.span[0] : m.span[1]] == m.surface


def test_longest_match_wins():
    store = Store()
    store.add_entity(historian("H1", "Amalia Ferro"))
    store.add_entity(historian("H2", "Federico Zanetti", aliases=["Zanetti"]))
    store.set_text(TextRecord("H1", "biography", "A letter from Federico Zanetti survives."))
    mentions = find_mentions(store.text("H1", "biography"), build_alias_index(store))
    assert [m.surface for m in mentions] == ["Federico Zanetti"]


def test_ambiguous_key_logs_no_mention():
    store = Store()
    store.add_entity(historian("H1", "Amalia Ferro"))
    store.add_entity(historian("H2", "Leonardo Bassi", aliases=["Leonardo"]))
    store.add_entity(Entity(id="T1", kind="topic", label="Leonardo"))
    store.set_text(TextRecord("H1", "biography", "Her work on Leonardo shaped the field."))
    ambiguities = []
    mentions = find_mentions(store.text("H1", "biography"), build_alias_index(store), ambiguities)
    assert mentions == []
    assert len(ambiguities) == 1
    assert ambiguities[0].candidate_ids == ("H2", "T1")


def test_self_mentions_excluded():
    store = Store()
    store.add_entity(historian("H1", "Amalia Ferro"))
    store.set_text(TextRecord("H1", "biography", "Amalia Ferro was born in Turin."))
    assert find_mentions(store.text("H1", "biography"), build_alias_index(store)) == []


def test_mentions_sorted_nonoverlapping_deterministic():
    store = Store()
    store.add_entity(historian("H1", "Amalia Ferro"))
    store.add_entity(historian("H2", "Bruno Castelli"))
    store.add_entity(historian("H3", "Clara Voss"))
    text = "Clara Voss corresponded with Bruno Castelli; Bruno Castelli replied."
    store.set_text(TextRecord("H1", "biography", text))
    index = build_alias_index(store)
    first = find_mentions(store.text("H1", "biography"), index)
    second = find_mentions(store.text("H1", "biography"), index)
    assert first == second
    starts = [m.span[0] for m in first]
    assert starts == sorted(starts)
    for a, b in zip(first, first[1:]):
        assert a.span[1] <= b.span[0]


def bio_fixture():
    store = make_f1_store()
    store.set_text(TextRecord("H1", "biography", "Worked closely with Bruno Castelli."))
    store.set_text(TextRecord("H2", "biography", "Trained in Milan."))
    return store


def test_mention_flags_bio_one_directional():
    flags = MentionFlags(bio_fixture())
    assert flags.flag("H1", "H2", "bio_one") == 1
    assert flags.flag("H2", "H1", "bio_one") == 1  # symmetric
    assert flags.flag("H1", "H2", "bio_both") == 0
    assert flags.flag("H1", "H3", "bio_one") == 0


def test_mention_flags_mutual():
    store = bio_fixture()
    store.set_text(TextRecord("H2", "biography", "Exchanged letters with Amalia Ferro."))
    flags = MentionFlags(store)
    assert flags.flag("H1", "H2", "bio_both") == 1
    assert flags.flag("H1", "H2", "bio_one") == 1
    assert flags.flag("H1", "H2", "any") == 1


def test_mention_flags_no_texts():
    flags = MentionFlags(make_f1_store())
    for scope in ("bio_one", "bio_both", "archive_of_a", "archive_of_b", "any"):
        assert flags.flag("H1", "H2", scope) == 0


def test_mention_flags_archive_scope():
    store = make_f1_store()
    store.add_entity(Entity(id="C1", kind="collection", label="Ferro Papers"))
    store.add_statement(Statement("H1", "produced", "C1", "g1"))
    store.set_text(TextRecord("C1", "description", "Notes exchanged with Bruno Castelli."))
    flags = MentionFlags(store)
    assert flags.flag("H1", "H2", "archive_of_a") == 1
    assert flags.flag("H1", "H2", "archive_of_b") == 0
    assert flags.flag("H2", "H1", "archive_of_b") == 1
    assert flags.flag("H1", "H2", "any") == 1


def test_mention_flags_unknown_historian():
    flags = MentionFlags(make_f1_store())
    with pytest.raises(NotFoundError):
        flags.flag("H1", "H404", "bio_one")


def test_ambiguity_log_file(tmp_path):
    store = Store()
    store.add_entity(historian("H1", "Amalia Ferro"))
    store.add_entity(historian("H2", "Leonardo Bassi", aliases=["Leonardo"]))
    store.add_entity(Entity(id="T1", kind="topic", label="Leonardo"))
    store.set_text(TextRecord("H1", "biography", "Wrote about Leonardo."))
    flags = MentionFlags(store)
    path = tmp_path / "ambiguities.jsonl"
    write_ambiguity_log(flags.ambiguities, path)
    lines = path.read_text(encoding="utf-8").strip().splitlines()
    assert len(lines) == 1
    assert "candidate_ids" in lines[0]


def test_surface_resolves_through_index():
    store = bio_fixture()
    index = build_alias_index(store)
    for record in store.texts():
        for m in find_mentions(record, index):
            assert index.lookup(normalize_surface(m.surface)) == frozenset({m.entity_id})
