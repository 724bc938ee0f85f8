import pytest

from archlink.ingest import AnnotationRecord
from archlink.store import Entity, Statement, Store


def make_f1_store() -> Store:
    """Three historians; H1/H2 share topic T1 and institution I1, H3 has T2."""
    store = Store()
    for eid, kind, label in [
        ("H1", "historian", "Amalia Ferro"),
        ("H2", "historian", "Bruno Castelli"),
        ("H3", "historian", "Clara Voss"),
        ("T1", "topic", "Quattrocento painting"),
        ("T2", "topic", "Baroque sculpture"),
        ("I1", "institution", "Istituto di Studi d'Arte"),
    ]:
        store.add_entity(Entity(id=eid, kind=kind, label=label))
    for subj, pred, obj in [
        ("H1", "subject", "T1"),
        ("H2", "subject", "T1"),
        ("H3", "subject", "T2"),
        ("H1", "subject", "I1"),
        ("H2", "subject", "I1"),
    ]:
        store.add_statement(Statement(subj, pred, obj, "g1"))
    return store


def f1_annotation(relation_exists=1.0, bio_one=1.0, on_subject=0.0, **extra):
    """The single artists_periods row of the F1 fixture."""
    defaults = dict(
        table="artists_periods",
        art_hist_1="H1",
        art_hist_2="H2",
        shared_subject="T1",
        relation_exists=relation_exists,
        recorded_in_one_bio=bio_one,
        recorded_in_both_bios=0.0,
        collaborated_on_subject=on_subject,
        h2_relevant_to_h1_archive=0.0,
        h2_mentioned_in_h1_archive=0.0,
        h1_relevant_to_h2_archive=0.0,
        h1_mentioned_in_h2_archive=0.0,
    )
    defaults.update(extra)
    return AnnotationRecord(**defaults)


@pytest.fixture
def f1_store() -> Store:
    return make_f1_store()
