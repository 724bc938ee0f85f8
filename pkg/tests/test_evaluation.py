import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from archlink.config import LearnConfig
from archlink.errors import ParameterError
from archlink.evaluation import (
    EvalMetrics,
    cross_validate,
    evaluate_grid,
    fold_metrics,
    select_model,
    stratified_kfold,
)
from archlink.features import FeatureSpec, LabeledDataset


def dataset(X, y, spec_name="topics"):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    return LabeledDataset(
        unit="historian_pair",
        spec=FeatureSpec.by_name(spec_name),
        pairs=tuple((f"a{i}", f"b{i}") for i in range(len(X))),
        X=X,
        y=np.asarray(y, dtype=int),
    )


# -- folds ------------------------------------------------------------------


def test_balanced_folds_one_of_each():
    labels = [1, 1, 1, 1, 1, 0, 0, 0, 0, 0]
    plan = stratified_kfold(labels, k=5, seed=0)
    for fold in range(5):
        idx = plan.fold_indices(fold)
        assert len(idx) == 2
        assert sum(labels[i] for i in idx) == 1


def test_fold_determinism():
    labels = [0, 1] * 8
    assert stratified_kfold(labels, 4, seed=3) == stratified_kfold(labels, 4, seed=3)
    assert stratified_kfold(labels, 4, seed=3) != stratified_kfold(labels, 4, seed=4)


def test_k_larger_than_rows_rejected():
    with pytest.raises(ParameterError):
        stratified_kfold([0, 1] * 5, k=11, seed=0)
    with pytest.raises(ParameterError):
        stratified_kfold([0, 1], k=1, seed=0)


@settings(max_examples=60, deadline=None)
@given(
    labels=st.lists(st.integers(0, 1), min_size=4, max_size=120),
    k=st.integers(2, 8),
    seed=st.integers(0, 10_000),
)
def test_stratification_invariant(labels, k, seed):
    if k > len(labels):
        k = len(labels)
    plan = stratified_kfold(labels, k, seed)
    labels = np.asarray(labels)
    assert sorted(set(plan.assignment)) == sorted(set(range(k)) & set(plan.assignment))
    # folds partition the rows
    assert len(plan.assignment) == len(labels)
    for cls in (0, 1):
        total = int((labels == cls).sum())
        per_fold = [
            sum(1 for i, f in enumerate(plan.assignment) if f == fold and labels[i] == cls)
            for fold in range(k)
        ]
        assert sum(per_fold) == total
        assert max(per_fold) - min(per_fold) <= 1  # within one of proportional


def test_small_class_spread_one_per_fold():
    labels = [1, 1, 0, 0, 0, 0, 0, 0, 0, 0]
    plan = stratified_kfold(labels, k=5, seed=9)
    pos_folds = [plan.assignment[0], plan.assignment[1]]
    assert pos_folds[0] != pos_folds[1]


# -- metrics ------------------------------------------------------------------


def brute_confusion(y_true, y_pred):
    tp = sum(1 for t, p in zip(y_true, y_pred) if t == 1 and p == 1)
    fp = sum(1 for t, p in zip(y_true, y_pred) if t == 0 and p == 1)
    fn = sum(1 for t, p in zip(y_true, y_pred) if t == 1 and p == 0)
    tn = sum(1 for t, p in zip(y_true, y_pred) if t == 0 and p == 0)
    return tp, fp, fn, tn


@settings(max_examples=80, deadline=None)
@given(
    rows=st.lists(
        st.tuples(st.integers(0, 1), st.integers(0, 1)), min_size=1, max_size=60
    )
)
def test_fold_metrics_match_bruteforce(rows):
    y_true = [t for t, _ in rows]
    y_pred = [p for _, p in rows]
    m = fold_metrics(y_true, y_pred)
    tp, fp, fn, tn = brute_confusion(y_true, y_pred)
    assert m.p1 == (tp / (tp + fp) if tp + fp else 0.0)
    assert m.r1 == (tp / (tp + fn) if tp + fn else 0.0)
    assert m.a == (tp + tn) / len(rows)
    p0 = tn / (tn + fn) if tn + fn else 0.0
    assert m.p == pytest.approx((p0 + m.p1) / 2)
    assert 0.0 <= m.p <= 1.0 and 0.0 <= m.a <= 1.0


def test_no_positive_prediction_gives_zero_p1():
    m = fold_metrics([1, 1, 0], [0, 0, 0])
    assert m.p1 == 0.0
    assert m.r1 == 0.0


# -- cross-validation -----------------------------------------------------------


def separable_data(n=30):
    rng = random.Random(2)
    X, y = [], []
    for _ in range(n):
        label = rng.randint(0, 1)
        X.append(rng.uniform(5, 6) if label else rng.uniform(0, 1))
        y.append(label)
    # ensure both classes
    X[0], y[0] = 0.5, 0
    X[1], y[1] = 5.5, 1
    return dataset(X, y)


def test_perfectly_separable_dt_scores_one():
    data = separable_data()
    plan = stratified_kfold(data.y, 5, seed=13)
    metrics, _ = cross_validate("dt", data, plan)
    assert metrics.p1 == 1.0
    assert metrics.r1 == 1.0
    assert metrics.a == 1.0


def test_uninformative_feature_zero_recall():
    # constant feature, negatives in the majority: every model predicts 0
    X = [1.0] * 20
    y = [1] * 6 + [0] * 14
    data = dataset(X, y)
    plan = stratified_kfold(data.y, 5, seed=1)
    for kind in ("lr", "nb", "dt"):
        metrics, _ = cross_validate(kind, data, plan)
        assert metrics.r1 == 0.0


def test_cv_metrics_match_per_fold_prediction_logs():
    """Recompute every metric from the logged predictions, independently."""
    data = separable_data(40)
    rng = np.random.default_rng(8)
    noisy = LabeledDataset(
        unit=data.unit,
        spec=data.spec,
        pairs=data.pairs,
        X=data.X + rng.normal(0, 2.5, size=data.X.shape),
        y=data.y,
    )
    plan = stratified_kfold(noisy.y, 5, seed=21)
    for kind in ("lr", "nb", "dt"):
        metrics, logs = cross_validate(kind, noisy, plan)
        p1s, r1s, accs, ps = [], [], [], []
        for log in logs:
            tp, fp, fn, tn = brute_confusion(log.y_true, log.y_pred)
            p1s.append(tp / (tp + fp) if tp + fp else 0.0)
            r1s.append(tp / (tp + fn) if tp + fn else 0.0)
            accs.append((tp + tn) / len(log.y_true))
            p0 = tn / (tn + fn) if tn + fn else 0.0
            ps.append((p0 + p1s[-1]) / 2)
        assert metrics.p1 == pytest.approx(float(np.mean(p1s)), abs=1e-12)
        assert metrics.r1 == pytest.approx(float(np.mean(r1s)), abs=1e-12)
        assert metrics.a == pytest.approx(float(np.mean(accs)), abs=1e-12)
        assert metrics.p == pytest.approx(float(np.mean(ps)), abs=1e-12)


def test_fold_logs_cover_all_rows():
    data = separable_data(25)
    plan = stratified_kfold(data.y, 5, seed=5)
    _, logs = cross_validate("nb", data, plan)
    seen = sorted(i for log in logs for i in log.indices)
    assert seen == list(range(len(data)))


# -- grid & selection -------------------------------------------------------------


def test_grid_runs_all_cells():
    data = separable_data(30)
    grid = evaluate_grid({"topics": data}, config=LearnConfig(k=5, seed=13))
    assert set(grid.cells) == {("topics", "lr"), ("topics", "nb"), ("topics", "dt")}
    assert all(cell.metrics is not None for cell in grid.cells.values())
    text = grid.to_text()
    assert "p(1)=" in text


def test_grid_records_cell_errors_and_continues():
    bad = dataset([1.0, 2.0, 3.0], [1, 1, 1])  # single class
    good = separable_data(30)
    grid = evaluate_grid(
        {"topics": good, "bio": bad}, config=LearnConfig(k=3, seed=13)
    )
    assert grid.cells[("bio", "lr")].error is not None
    assert grid.cells[("topics", "lr")].metrics is not None


def metrics_for(p1):
    return EvalMetrics(p=p1, p1=p1, r1=0.5, a=0.5)


def test_select_model_prefers_nb_on_ties():
    column = {"lr": metrics_for(1.0), "nb": metrics_for(1.0), "dt": metrics_for(1.0)}
    assert select_model(column) == "nb"


def test_select_model_argmax():
    column = {"lr": metrics_for(0.59), "nb": metrics_for(0.61), "dt": metrics_for(0.65)}
    assert select_model(column) == "dt"
    column = {"lr": metrics_for(0.6), "nb": metrics_for(0.0), "dt": metrics_for(0.0)}
    assert select_model(column) == "lr"


def test_select_model_scale_invariant():
    rng = random.Random(12)
    for _ in range(30):
        column = {k: metrics_for(rng.random()) for k in ("lr", "nb", "dt")}
        scale = rng.uniform(0.1, 1.0)
        scaled = {
            k: EvalMetrics(p=m.p, p1=m.p1 * scale, r1=m.r1, a=m.a)
            for k, m in column.items()
        }
        assert select_model(column) == select_model(scaled)


def test_lr_tie_break_order_is_nb_lr_dt():
    column = {"lr": metrics_for(0.8), "dt": metrics_for(0.8)}
    assert select_model(column) == "lr"
