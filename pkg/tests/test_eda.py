import random

import pytest

from archlink.eda import (
    build_report,
    collection_stats,
    historian_stats,
    merged_stats,
    network_export,
)
from archlink.errors import IncompleteDataError, UnsupportedTableError
from archlink.expansion import (
    attach_annotations,
    expand_institution_pairs,
    expand_topic_pairs,
    merge_tables,
)
from archlink.ingest import AnnotationRecord
from archlink.store import Entity, Statement, Store

from conftest import f1_annotation, make_f1_store


def annotated_f1(**kwargs):
    store = make_f1_store()
    topics = expand_topic_pairs(store)
    record = f1_annotation(**kwargs)
    annotated, _ = attach_annotations(topics, [record])
    return store, annotated, record


def test_f1_stats_hand_count():
    # single row, valid, recorded in one bio, not on the shared subject
    _, annotated, _ = annotated_f1(relation_exists=1.0, bio_one=1.0, on_subject=0.0)
    stats = historian_stats(annotated)
    assert stats.as_tuple() == (1, 1, 1, 1, 0, 0)
    assert stats.unique_historians == 2
    assert stats.unique_subjects == 1


def test_f1_merged_stats_hand_count():
    store = make_f1_store()
    topics = expand_topic_pairs(store)
    insts = expand_institution_pairs(store)
    record = f1_annotation()
    topics, _ = attach_annotations(topics, [record])
    insts, _ = attach_annotations(
        insts,
        [
            AnnotationRecord(
                table="institutions",
                art_hist_1="H1",
                art_hist_2="H2",
                shared_subject="I1",
                relation_exists=1.0,
            )
        ],
        flag_map={("H1", "H2"): topics.rows[0].flags},
    )
    merged = merge_tables(topics, insts)
    stats = merged_stats(merged)
    assert stats.as_tuple() == (1, 1, 1, 1, 0, 0)


def test_empty_merge_all_zero():
    store = make_f1_store()
    # rebuild without the shared institution so the merge comes out empty
    store2 = Store()
    for ent in store.entities():
        store2.add_entity(ent)
    store2.add_statement(Statement("H1", "subject", "T1", "g1"))
    store2.add_statement(Statement("H2", "subject", "T1", "g1"))
    merged = merge_tables(expand_topic_pairs(store2), expand_institution_pairs(store2))
    stats = merged_stats(merged)
    assert stats.as_tuple() == (0, 0, 0, 0, 0, 0)


def test_missing_annotations_rejected():
    store = make_f1_store()
    topics = expand_topic_pairs(store)
    with pytest.raises(IncompleteDataError):
        historian_stats(topics)


def test_institutions_table_has_no_subject_column():
    store = make_f1_store()
    insts = expand_institution_pairs(store)
    annotated, _ = attach_annotations(
        insts,
        [
            AnnotationRecord(
                table="institutions",
                art_hist_1="H1",
                art_hist_2="H2",
                shared_subject="I1",
                relation_exists=1.0,
            )
        ],
    )
    assert historian_stats(annotated).valid_on_shared_subject is None
    with pytest.raises(UnsupportedTableError):
        collection_stats(annotated)


def test_collection_stats_f1_zero():
    _, annotated, _ = annotated_f1()
    assert collection_stats(annotated).as_tuple() == (0, 0)


def test_collection_stats_counts_relevance():
    _, annotated, _ = annotated_f1(h2_relevant_to_h1_archive=1.0, bio_one=0.0)
    assert collection_stats(annotated).as_tuple() == (1, 1)
    _, annotated, _ = annotated_f1(h1_relevant_to_h2_archive=1.0, bio_one=1.0)
    assert collection_stats(annotated).as_tuple() == (1, 0)


def test_network_export_f1_topics():
    store = make_f1_store()
    topics = expand_topic_pairs(store)
    net = network_export(store, topics, "topics")
    assert len(net.nodes) == 3  # every historian with a topic, H3 included
    assert net.edges == ((("H1", "H2"), 1),)
    assert net.density == pytest.approx(1 / 3)


def test_network_density_complete_graph():
    store = Store()
    for i in range(3):
        store.add_entity(Entity(id=f"h{i}", kind="historian", label=f"H {i}"))
    store.add_entity(Entity(id="t0", kind="topic", label="Shared"))
    for i in range(3):
        store.add_statement(Statement(f"h{i}", "subject", "t0", "g1"))
    net = network_export(store, expand_topic_pairs(store), "topics")
    assert net.density == pytest.approx(1.0)


def test_network_edge_weights_count_shared_subjects():
    store = make_f1_store()
    store.add_entity(Entity(id="T9", kind="topic", label="Second shared"))
    store.add_statement(Statement("H1", "subject", "T9", "g1"))
    store.add_statement(Statement("H2", "subject", "T9", "g1"))
    net = network_export(store, expand_topic_pairs(store), "topics")
    assert net.edges == ((("H1", "H2"), 2),)
    assert all(w >= 1 for _, w in net.edges)


def test_stats_match_bruteforce_recount():
    rng = random.Random(3)
    for _ in range(30):
        n_rows = rng.randint(0, 50)
        store = Store()
        for i in range(12):
            store.add_entity(Entity(id=f"h{i:02d}", kind="historian", label=f"H {i}"))
        rows = []
        records = []
        for j in range(n_rows):
            a, b = rng.sample(range(12), 2)
            a, b = sorted((a, b))
            topic = f"t{j}"
            store.add_entity(Entity(id=topic, kind="topic", label=f"T {j}"))
            store.add_statement(Statement(f"h{a:02d}", "subject", topic, "g1"))
            store.add_statement(Statement(f"h{b:02d}", "subject", topic, "g1"))
            records.append(
                f1_annotation(
                    art_hist_1=f"h{a:02d}",
                    art_hist_2=f"h{b:02d}",
                    shared_subject=topic,
                    relation_exists=float(rng.random() < 0.5),
                    bio_one=float(rng.random() < 0.3),
                    on_subject=float(rng.random() < 0.2),
                )
            )
        dataset = expand_topic_pairs(store)
        annotated, orphans = attach_annotations(dataset, records)
        assert not orphans
        stats = historian_stats(annotated)

        # independent recount straight off the records / pair flags
        from archlink.expansion import build_flag_map
        from archlink.store import canonical_pair

        flag_map = build_flag_map(records)
        valid = [r for r in records if r.relation_exists == 1]
        assert stats.total_relations == len(records)
        assert stats.unique_pairs == len(
            {canonical_pair(r.art_hist_1, r.art_hist_2) for r in records}
        )
        assert stats.valid_relations == len(valid)
        assert stats.valid_unique_pairs == len(
            {canonical_pair(r.art_hist_1, r.art_hist_2) for r in valid}
        )
        assert stats.valid_not_recorded == sum(
            1
            for r in valid
            if flag_map[canonical_pair(r.art_hist_1, r.art_hist_2)].bio_one == 0
        )
        assert stats.valid_on_shared_subject == sum(
            1 for r in valid if r.collaborated_on_subject == 1
        )


def test_report_percentages_recompute():
    store = make_f1_store()
    topics, _ = attach_annotations(expand_topic_pairs(store), [f1_annotation()])
    insts, _ = attach_annotations(
        expand_institution_pairs(store),
        [
            AnnotationRecord(
                table="institutions",
                art_hist_1="H1",
                art_hist_2="H2",
                shared_subject="I1",
                relation_exists=1.0,
            )
        ],
        flag_map={("H1", "H2"): topics.rows[0].flags},
    )
    merged = merge_tables(topics, insts)
    report = build_report(store, topics, insts, merged)
    text = report.text()
    assert "100%" in text  # 1/1 valid recomputed from counts
    counts = report.counts()
    assert counts["historian_relations"]["artists_periods"]["total_relations"] == 1
    assert "network_density" in counts
