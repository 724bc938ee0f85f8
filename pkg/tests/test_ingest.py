import pytest

from archlink.errors import KindError, LabelError, ParseError, SchemaError, VocabularyError
from archlink.ingest import (
    AnnotationRecord,
    DumpManifest,
    count_half_labels,
    export_store,
    load_annotations,
    load_entities,
    load_statements,
    load_texts,
    normalize_labels,
    write_annotations,
)
from archlink.store import Store, TextRecord

from conftest import f1_annotation, make_f1_store


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_load_entities_counts(tmp_path):
    lines = "\n".join(
        '{"id": "h%02d", "kind": "historian", "label": "Historian %d"}' % (i, i)
        for i in range(26)
    )
    path = write(tmp_path / "entities.jsonl", lines + "\n")
    store = Store()
    assert load_entities(store, path) == 26
    assert len(store.entities("historian")) == 26


def test_load_entities_empty_file(tmp_path):
    path = write(tmp_path / "entities.jsonl", "")
    assert load_entities(Store(), path) == 0


def test_load_entities_missing_kind(tmp_path):
    path = write(
        tmp_path / "entities.jsonl",
        '{"id": "h1", "kind": "historian", "label": "A"}\n{"id": "h2", "label": "B"}\n',
    )
    with pytest.raises(ParseError) as err:
        load_entities(Store(), path)
    assert err.value.line == 2


def test_load_statements_dedup_and_vocab(tmp_path):
    store = make_f1_store()
    path = write(
        tmp_path / "stmts.csv",
        "subject,predicate,object,graph\nH3,subject,T1,g1\nH3,subject,T1,g1\nH1,subject,T2,g1\n",
    )
    assert load_statements(store, path) == 2

    bad = write(
        tmp_path / "bad.csv",
        "subject,predicate,object,graph\nH1,likes,T1,g1\n",
    )
    with pytest.raises(VocabularyError):
        load_statements(make_f1_store(), bad)


def test_load_texts_replace_and_kind(tmp_path):
    store = make_f1_store()
    path = write(
        tmp_path / "texts.jsonl",
        '{"entity_id": "H1", "field": "biography", "text": "First draft."}\n'
        '{"entity_id": "H1", "field": "biography", "text": "Final version."}\n',
    )
    assert load_texts(store, path) == 2
    assert store.text("H1", "biography").text == "Final version."
    assert len(store.texts()) == 1

    bad = write(
        tmp_path / "bad.jsonl",
        '{"entity_id": "I1", "field": "description", "text": "Not allowed."}\n',
    )
    with pytest.raises(KindError):
        load_texts(store, bad)


ANNOT_HEADER = "A1,A2,A3,A4,A5,A6,A7,A8,A9,A10,A11\n"


def test_load_annotations_artists_periods(tmp_path):
    path = write(
        tmp_path / "ap.csv",
        ANNOT_HEADER + "H1,H2,T1,1,1,0,0,0,0,0,0\nH2,H3,T2,0.5,0,0,0,0,0,0,0\n",
    )
    records = load_annotations(path, "artists_periods")
    assert len(records) == 2
    assert records[0].relation_exists == 1.0
    assert records[1].relation_exists == 0.5


def test_load_annotations_header_mismatch(tmp_path):
    path = write(tmp_path / "ap.csv", "X1,X2\nH1,H2\n")
    with pytest.raises(SchemaError):
        load_annotations(path, "artists_periods")


def test_load_annotations_bad_label(tmp_path):
    path = write(tmp_path / "ap.csv", ANNOT_HEADER + "H1,H2,T1,2,0,0,0,0,0,0,0\n")
    with pytest.raises(LabelError):
        load_annotations(path, "artists_periods")


def test_blank_label_reads_as_zero(tmp_path):
    path = write(tmp_path / "ap.csv", ANNOT_HEADER + "H1,H2,T1,,0,0,0,0,0,0,0\n")
    records = load_annotations(path, "artists_periods")
    assert records[0].relation_exists == 0.0


def test_institutions_table(tmp_path):
    path = write(
        tmp_path / "inst.csv",
        "I1,I2,I3,I4,I5\nH1,H2,I1,1,colleagues\nH1,H3,I1,0,\n",
    )
    records = load_annotations(path, "institutions")
    assert records[0].relation_kind_note == "colleagues"
    assert records[1].relation_kind_note is None
    assert records[0].collaborated_on_subject is None


def test_normalize_labels():
    records = [
        f1_annotation(relation_exists=0.5),
        f1_annotation(relation_exists=1.0),
        f1_annotation(relation_exists=0.0, recorded_in_one_bio=0.5),
    ]
    assert count_half_labels(records) == 2
    normalized = normalize_labels(records)
    assert [r.relation_exists for r in normalized] == [0.0, 1.0, 0.0]
    assert normalized[2].recorded_in_one_bio == 0.0
    # idempotent
    assert normalize_labels(normalized) == normalized
    # full-scan: nothing outside {0, 1} remains
    assert count_half_labels(normalized) == 0


def test_annotation_roundtrip(tmp_path):
    records = [f1_annotation(), f1_annotation(art_hist_2="H3", relation_exists=0.0, bio_one=0.0)]
    path = tmp_path / "ap.csv"
    write_annotations(records, path)
    assert load_annotations(path, "artists_periods") == records


def test_store_roundtrip(tmp_path):
    store = make_f1_store()
    store.set_text(TextRecord("H1", "biography", "Worked with Bruno Castelli in Rome."))
    export_store(store, tmp_path)
    reloaded = Store()
    load_entities(reloaded, tmp_path / "entities.jsonl")
    load_statements(reloaded, tmp_path / "statements.csv")
    load_texts(reloaded, tmp_path / "texts.jsonl")
    assert reloaded.content_hash() == store.content_hash()


def test_manifest_loading(tmp_path):
    export_store(make_f1_store(), tmp_path)
    manifest = DumpManifest.load(tmp_path / "manifest.json")
    assert manifest.entities_path.exists()
    assert manifest.statements_path.exists()
    with pytest.raises(SchemaError):
        (tmp_path / "broken.json").write_text("{}", encoding="utf-8")
        DumpManifest.load(tmp_path / "broken.json")
