"""Stratified cross-validation, the four-number metric suite, the model x
feature grid, and precision-first model selection.

Metrics per fold: macro precision over both classes (p), precision and
recall of class 1 (p1, r1), accuracy (a). Folds weigh equally in the
average; a fold with no positive prediction contributes 0 to p1.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import LearnConfig
from .errors import ArchlinkError, DegenerateDataError, ParameterError
from .features import LabeledDataset
from .models import MODEL_KINDS, predict_batch, train


@dataclass(frozen=True)
class FoldPlan:
    k: int
    seed: int
    assignment: tuple[int, ...]  # row index -> fold id

    def fold_indices(self, fold: int) -> np.ndarray:
        return np.array([i for i, f in enumerate(self.assignment) if f == fold], dtype=int)


@dataclass(frozen=True)
class EvalMetrics:
    p: float
    p1: float
    r1: float
    a: float

    def as_dict(self) -> dict:
        return {"p": self.p, "p1": self.p1, "r1": self.r1, "a": self.a}


@dataclass(frozen=True)
class FoldLog:
    fold: int
    indices: tuple[int, ...]
    y_true: tuple[int, ...]
    y_pred: tuple[int, ...]
    scores: tuple[float, ...]


@dataclass(frozen=True)
class CellResult:
    spec: str
    kind: str
    metrics: EvalMetrics | None
    folds: tuple[FoldLog, ...] = ()
    error: str | None = None


def stratified_kfold(labels, k: int, seed: int) -> FoldPlan:
    """Deterministic stratified fold assignment.

    Indices of each class are shuffled with the seeded generator and dealt
    round-robin, so per-fold class counts stay within one of proportional.
    Classes smaller than k simply spread one per fold.
    """
    labels = np.asarray(labels, dtype=int)
    n = len(labels)
    if k < 2:
        raise ParameterError(f"fold count must be at least 2, got {k}")
    if k > n:
        raise ParameterError(f"fold count {k} exceeds {n} rows")
    rng = np.random.default_rng(seed)
    assignment = np.empty(n, dtype=int)
    for cls in sorted(np.unique(labels)):
        idx = np.flatnonzero(labels == cls)
        rng.shuffle(idx)
        offset = int(rng.integers(k))
        for pos, row in enumerate(idx):
            assignment[row] = (pos + offset) % k
    return FoldPlan(k=k, seed=seed, assignment=tuple(int(f) for f in assignment))


def fold_metrics(y_true, y_pred) -> EvalMetrics:
    """Confusion-matrix metrics for one fold."""
    y_true = np.asarray(y_true, dtype=int)
    y_pred = np.asarray(y_pred, dtype=int)
    tp = int(((y_true == 1) & (y_pred == 1)).sum())
    fp = int(((y_true == 0) & (y_pred == 1)).sum())
    fn = int(((y_true == 1) & (y_pred == 0)).sum())
    tn = int(((y_true == 0) & (y_pred == 0)).sum())
    p1 = tp / (tp + fp) if tp + fp else 0.0
    p0 = tn / (tn + fn) if tn + fn else 0.0
    r1 = tp / (tp + fn) if tp + fn else 0.0
    a = (tp + tn) / len(y_true) if len(y_true) else 0.0
    return EvalMetrics(p=(p0 + p1) / 2.0, p1=p1, r1=r1, a=a)


def cross_validate(
    kind: str,
    data: LabeledDataset,
    plan: FoldPlan,
    config: LearnConfig = LearnConfig(),
) -> tuple[EvalMetrics, tuple[FoldLog, ...]]:
    """Train on each fold's complement, evaluate on the fold, average."""
    if len(plan.assignment) != len(data):
        raise ParameterError("fold plan does not cover the dataset")
    per_fold = []
    logs = []
    assignment = np.asarray(plan.assignment)
    for fold in range(plan.k):
        test_mask = assignment == fold
        train_data = LabeledDataset(
            unit=data.unit,
            spec=data.spec,
            pairs=tuple(p for p, m in zip(data.pairs, test_mask) if not m),
            X=data.X[~test_mask],
            y=data.y[~test_mask],
        )
        try:
            model = train(kind, train_data, config)
        except ArchlinkError as exc:
            raise DegenerateDataError(
                f"training {kind} failed in fold {fold}: {exc.message}",
                {"fold": fold},
            ) from exc
        y_pred, scores = predict_batch(model, data.X[test_mask])
        y_true = data.y[test_mask]
        per_fold.append(fold_metrics(y_true, y_pred))
        logs.append(
            FoldLog(
                fold=fold,
                indices=tuple(int(i) for i in np.flatnonzero(test_mask)),
                y_true=tuple(int(v) for v in y_true),
                y_pred=tuple(int(v) for v in y_pred),
                scores=tuple(float(s) for s in scores),
            )
        )
    metrics = EvalMetrics(
        p=float(np.mean([m.p for m in per_fold])),
        p1=float(np.mean([m.p1 for m in per_fold])),
        r1=float(np.mean([m.r1 for m in per_fold])),
        a=float(np.mean([m.a for m in per_fold])),
    )
    return metrics, tuple(logs)


@dataclass(frozen=True)
class GridReport:
    unit: str
    k: int
    seed: int
    cells: dict  # (spec name, kind) -> CellResult

    def column(self, spec_name: str) -> dict:
        return {
            kind: cell.metrics
            for (spec, kind), cell in self.cells.items()
            if spec == spec_name and cell.metrics is not None
        }

    def spec_names(self) -> list[str]:
        return sorted({spec for spec, _ in self.cells}, key=_spec_order)

    def to_json(self) -> dict:
        return {
            "unit": self.unit,
            "k": self.k,
            "seed": self.seed,
            "cells": [
                {
                    "spec": spec,
                    "model": kind,
                    "metrics": cell.metrics.as_dict() if cell.metrics else None,
                    "error": cell.error,
                }
                for (spec, kind), cell in sorted(self.cells.items())
            ],
        }

    def to_text(self) -> str:
        specs = self.spec_names()
        lines = [f"unit={self.unit} k={self.k} seed={self.seed}"]
        width = max(len(s) for s in specs) + 2
        header = "model".ljust(8) + "".join(s.ljust(max(width, 26)) for s in specs)
        lines.append(header)
        for kind in MODEL_KINDS:
            cells = []
            for spec in specs:
                cell = self.cells.get((spec, kind))
                if cell is None or cell.metrics is None:
                    cells.append(("err: " + (cell.error or "?"))[: max(width, 26) - 1])
                else:
                    m = cell.metrics
                    cells.append(
                        f"p={m.p:.2f} p(1)={m.p1:.2f} r(1)={m.r1:.2f} a={m.a:.2f}"
                    )
            lines.append(kind.ljust(8) + "".join(c.ljust(max(width, 26)) for c in cells))
        return "\n".join(lines) + "\n"


def evaluate_grid(
    datasets_by_spec: dict,
    kinds=MODEL_KINDS,
    config: LearnConfig = LearnConfig(),
) -> GridReport:
    """Cross-validate every model on every spec, sharing folds per spec.

    Per-cell failures are recorded in the cell; the rest of the grid is
    still produced.
    """
    cells = {}
    unit = None
    for spec_name, data in datasets_by_spec.items():
        unit = data.unit
        plan = stratified_kfold(data.y, config.k, config.seed)
        for kind in kinds:
            try:
                metrics, logs = cross_validate(kind, data, plan, config)
                cells[(spec_name, kind)] = CellResult(
                    spec=spec_name, kind=kind, metrics=metrics, folds=logs
                )
            except ArchlinkError as exc:
                cells[(spec_name, kind)] = CellResult(
                    spec=spec_name, kind=kind, metrics=None, error=exc.message
                )
    return GridReport(unit=unit or "historian_pair", k=config.k, seed=config.seed, cells=cells)


_SELECT_PREFERENCE = {"nb": 0, "lr": 1, "dt": 2}


def select_model(column: dict) -> str:
    """Pick the most precise model for one spec column.

    Argmax of p1; exact ties prefer naive Bayes, then logistic regression,
    then the tree.
    """
    if not column:
        raise ParameterError("cannot select a model from an empty column")
    best_p1 = max(m.p1 for m in column.values())
    tied = [kind for kind, m in column.items() if m.p1 == best_p1]
    return min(tied, key=lambda kind: _SELECT_PREFERENCE[kind])


def write_grid_report(report: GridReport, out_dir, stem: str) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / f"{stem}.txt").write_text(report.to_text(), encoding="utf-8")
    (out_dir / f"{stem}.json").write_text(
        json.dumps(report.to_json(), indent=2), encoding="utf-8"
    )
    with (out_dir / f"{stem}_folds.jsonl").open("w", encoding="utf-8") as fh:
        for (spec, kind), cell in sorted(report.cells.items()):
            for log in cell.folds:
                fh.write(
                    json.dumps(
                        {
                            "spec": spec,
                            "model": kind,
                            "fold": log.fold,
                            "indices": list(log.indices),
                            "y_true": list(log.y_true),
                            "y_pred": list(log.y_pred),
                            "scores": [round(s, 6) for s in log.scores],
                        }
                    )
                    + "\n"
                )


def _spec_order(name: str) -> tuple:
    order = [
        "bio",
        "arch_desc",
        "bio+arch_desc",
        "topics",
        "topics+bio",
        "topics+arch_desc",
        "topics+bio+arch_desc",
        "inst",
        "inst+topics",
    ]
    return (order.index(name) if name in order else len(order), name)
