"""Distance matrices, weighted fusion, leave-one-out nearest-neighbour diagnosis.

Each database item is its own query: its neighbours are ranked by one
column of the distance matrix (itself excluded), the label of the nearest
one is the predicted diagnosis, and predictions are scored as accuracy,
sensitivity (positives found) and specificity (negatives found).
"""
from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from joblib import Parallel, delayed

from .bottleneck import bottleneck_distance
from .diagram import PersistenceDiagram
from .exceptions import (
    ConfigurationError,
    DimensionError,
    EmptyInputError,
    InvalidArgumentError,
    InvalidWeightsError,
    MissingLabelsError,
    ParseError,
    UndefinedMetricError,
)
from .symfun import SymVector
from .utils import atomic_write_text, n_jobs_from_env

__all__ = [
    "DistanceMatrix",
    "EvaluationReport",
    "compute_distance_matrix",
    "combine_matrices",
    "leave_one_out_nn",
    "evaluate",
    "loo_accuracy",
    "optimize_weights",
    "read_matrix",
    "write_matrix",
]


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Symmetric, nonnegative, zero-diagonal matrix of pairwise dissimilarities."""

    entries: np.ndarray
    item_ids: tuple = ()
    labels: Optional[tuple] = None

    def __post_init__(self):
        e = np.array(self.entries, dtype=float)
        if e.ndim != 2 or e.shape[0] != e.shape[1] or e.shape[0] == 0:
            raise DimensionError(f"expected a nonempty square matrix, got shape {e.shape}")
        if not np.all(np.isfinite(e)) or np.any(e < 0):
            raise InvalidArgumentError("distances must be finite and nonnegative")
        if np.any(np.diag(e) != 0):
            raise InvalidArgumentError("diagonal must be zero")
        if not np.array_equal(e, e.T):
            raise InvalidArgumentError("matrix must be symmetric")
        n = e.shape[0]
        ids = tuple(str(i) for i in self.item_ids) if self.item_ids else tuple(str(i) for i in range(n))
        if len(ids) != n:
            raise DimensionError(f"{len(ids)} item ids for a {n}x{n} matrix")
        labels = self.labels
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != n:
                raise DimensionError(f"{len(labels)} labels for a {n}x{n} matrix")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)
        object.__setattr__(self, "item_ids", ids)
        object.__setattr__(self, "labels", labels)

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def with_labels(self, labels) -> "DistanceMatrix":
        return DistanceMatrix(self.entries, self.item_ids, labels)


@dataclass(frozen=True)
class EvaluationReport:
    accuracy: float
    sensitivity: float
    specificity: float
    true_positives: int
    false_negatives: int
    true_negatives: int
    false_positives: int
    predictions: tuple = field(default=())
    positive_class: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "sensitivity": self.sensitivity,
            "specificity": self.specificity,
            "confusion": {
                "tp": self.true_positives,
                "fn": self.false_negatives,
                "tn": self.true_negatives,
                "fp": self.false_positives,
            },
            "positive_class": self.positive_class,
            "predictions": list(self.predictions),
        }


def _pairwise(items, fn, n_jobs):
    n = len(items)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    if n_jobs == 1 or len(pairs) < 2:
        values = [fn(items[i], items[j]) for i, j in pairs]
    else:
        values = Parallel(n_jobs=n_jobs)(delayed(fn)(items[i], items[j]) for i, j in pairs)
    out = np.zeros((n, n))
    for (i, j), d in zip(pairs, values):
        out[i, j] = out[j, i] = d
    return out


def _symvector_matrix(items: Sequence[SymVector]) -> np.ndarray:
    ks = {v.k for v in items}
    if len(ks) != 1:
        raise DimensionError(f"SymVectors have differing k: {sorted(ks)}")
    comps = np.stack([v.components for v in items])
    n = len(items)
    out = np.zeros((n, n))
    # Row-at-a-time keeps every entry's summation order fixed (upper triangle,
    # mirrored), so the result never depends on how work is split.
    for i in range(n - 1):
        out[i, i + 1:] = np.abs(comps[i + 1:] - comps[i]).sum(axis=1)
    return np.triu(out, 1) + np.triu(out, 1).T


def compute_distance_matrix(items, method: str = "vector_d", item_ids=(), labels=None,
                            n_jobs: Optional[int] = None) -> DistanceMatrix:
    """Pairwise distances between SymVectors or between diagrams.

    Parameters
    ----------
    items : list of SymVector (``method="vector_d"``) or PersistenceDiagram
        (``method="bottleneck"``)
    method : {"vector_d", "bottleneck"}
    n_jobs : int, optional
        Workers for the bottleneck pairs; defaults to ``PHWARP_THREADS`` or 1.
    """
    items = list(items)
    if not items:
        raise EmptyInputError("no items to compare")
    if method == "vector_d":
        if not all(isinstance(x, SymVector) for x in items):
            raise ConfigurationError("method 'vector_d' needs SymVector items")
        entries = _symvector_matrix(items)
    elif method == "bottleneck":
        if not all(isinstance(x, PersistenceDiagram) for x in items):
            raise ConfigurationError("method 'bottleneck' needs PersistenceDiagram items")
        entries = _pairwise(items, bottleneck_distance, n_jobs or n_jobs_from_env())
    else:
        raise ConfigurationError(f"unknown method {method!r}")
    if not item_ids:
        item_ids = tuple(getattr(x, "label", None) or str(i) for i, x in enumerate(items))
    return DistanceMatrix(entries, tuple(item_ids), labels)


def combine_matrices(matrices: Sequence[DistanceMatrix], weights) -> DistanceMatrix:
    """Weighted average ``sum(w_i * M_i) / sum(w_i)``.

    Ids and labels come from the first matrix.
    """
    matrices = list(matrices)
    w = np.asarray(weights, dtype=float).ravel()
    if not matrices:
        raise EmptyInputError("no matrices to combine")
    if len(w) != len(matrices):
        raise DimensionError(f"{len(w)} weights for {len(matrices)} matrices")
    if np.any(w < 0) or not np.all(np.isfinite(w)) or w.sum() <= 0:
        raise InvalidWeightsError("weights must be finite, nonnegative and not all zero")
    size = matrices[0].size
    if any(m.size != size for m in matrices):
        raise DimensionError("matrices differ in size")
    w = w / w.sum()
    total = np.zeros((size, size))
    for wi, m in zip(w, matrices):
        total += wi * m.entries
    first = matrices[0]
    return DistanceMatrix(total, first.item_ids, first.labels)


def leave_one_out_nn(matrix: DistanceMatrix, n_neighbors: int = 1) -> list:
    """Predict each item's label from its nearest other items.

    With one neighbour the label of the closest item is returned, ties going
    to the smallest index. With more, the majority label among the
    ``n_neighbors`` closest wins; vote ties go to the label whose first
    occurrence in the ranking is nearest.
    """
    if matrix.labels is None:
        raise MissingLabelsError("leave-one-out retrieval needs labels")
    n = matrix.size
    if n < 2:
        raise DimensionError("leave-one-out needs at least two items")
    if int(n_neighbors) != n_neighbors or not 1 <= n_neighbors <= n - 1:
        raise InvalidArgumentError(f"n_neighbors must lie in [1, {n - 1}], got {n_neighbors}")
    labels = matrix.labels
    preds = []
    for j in range(n):
        col = matrix.entries[:, j].copy()
        col[j] = np.inf
        ranking = np.argsort(col, kind="stable")[:n_neighbors]
        if n_neighbors == 1:
            preds.append(labels[ranking[0]])
            continue
        votes = Counter(labels[i] for i in ranking)
        top = max(votes.values())
        preds.append(next(labels[i] for i in ranking if votes[labels[i]] == top))
    return preds


def evaluate(predictions, labels, positive_class) -> EvaluationReport:
    """Accuracy, sensitivity and specificity in percent.

    Every label other than ``positive_class`` counts as negative, so several
    negative classes collapse into one.

    Raises
    ------
    UndefinedMetricError
        If there are no positive or no negative items.
    """
    predictions, labels = list(predictions), list(labels)
    if len(predictions) != len(labels):
        raise DimensionError(f"{len(predictions)} predictions for {len(labels)} labels")
    if not labels:
        raise EmptyInputError("nothing to evaluate")
    actual = np.array([lab == positive_class for lab in labels])
    predicted = np.array([p == positive_class for p in predictions])
    if not actual.any():
        raise UndefinedMetricError(f"sensitivity undefined: no items of class {positive_class!r}")
    if actual.all():
        raise UndefinedMetricError("specificity undefined: no negative items")
    correct = np.array([p == lab for p, lab in zip(predictions, labels)])
    tp = int(np.sum(actual & predicted))
    fn = int(np.sum(actual & ~predicted))
    tn = int(np.sum(~actual & ~predicted))
    fp = int(np.sum(~actual & predicted))
    return EvaluationReport(
        accuracy=100.0 * correct.mean(),
        sensitivity=100.0 * tp / (tp + fn),
        specificity=100.0 * tn / (tn + fp),
        true_positives=tp,
        false_negatives=fn,
        true_negatives=tn,
        false_positives=fp,
        predictions=tuple(predictions),
        positive_class=positive_class,
    )


def loo_accuracy(matrix: DistanceMatrix, n_neighbors: int = 1) -> float:
    preds = leave_one_out_nn(matrix, n_neighbors)
    return 100.0 * float(np.mean([p == lab for p, lab in zip(preds, matrix.labels)]))


def optimize_weights(matrices: Sequence[DistanceMatrix], grid_step: float = 0.05,
                     n_neighbors: int = 1, max_sweeps: int = 100):
    """Coordinate ascent on leave-one-out accuracy over fusion weights.

    Starts from the best of the uniform weighting and every single matrix
    alone, then sweeps the coordinates, setting each weight to the grid value
    in ``{0, step, ..., 1}`` that strictly improves accuracy, until a sweep
    brings no gain. Deterministic for a given matrix order.

    Returns
    -------
    weights : ndarray, summing to 1
    accuracy : float
        Leave-one-out accuracy of the returned combination, in percent.
    """
    matrices = list(matrices)
    if not matrices:
        raise EmptyInputError("no matrices to weigh")
    if not 0 < grid_step <= 1:
        raise InvalidArgumentError(f"grid_step must lie in (0, 1], got {grid_step}")
    for m in matrices:
        if m.labels is None:
            raise MissingLabelsError("every matrix needs labels")
    size = matrices[0].size
    if any(m.size != size for m in matrices):
        raise DimensionError("matrices differ in size")
    n = len(matrices)
    if n == 1:
        return np.ones(1), loo_accuracy(matrices[0], n_neighbors)

    cache: dict = {}

    def score(w):
        key = tuple(np.round(w / w.sum(), 12))
        if key not in cache:
            cache[key] = loo_accuracy(combine_matrices(matrices, w), n_neighbors)
        return cache[key]

    grid = np.unique(np.clip(np.append(np.arange(0.0, 1.0, grid_step), 1.0), 0.0, 1.0))
    starts = [np.full(n, 1.0 / n)] + [np.eye(n)[i] for i in range(n)]
    best_w = starts[0]
    best = score(best_w)
    for w in starts[1:]:
        s = score(w)
        if s > best:
            best, best_w = s, w
    best_w = best_w.copy()
    for _ in range(max_sweeps):
        improved = False
        for i in range(n):
            for g in grid:
                if g == best_w[i]:
                    continue
                trial = best_w.copy()
                trial[i] = g
                if trial.sum() <= 0:
                    continue
                s = score(trial)
                if s > best:
                    best, best_w, improved = s, trial, True
        if not improved:
            break
    return best_w / best_w.sum(), best


# -- file formats --------------------------------------------------------------


def format_matrix(matrix: DistanceMatrix) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(matrix.item_ids)
    writer.writerow(matrix.labels if matrix.labels is not None else [""] * matrix.size)
    for row in matrix.entries:
        writer.writerow([repr(float(x)) for x in row])
    return buf.getvalue()


def write_matrix(matrix: DistanceMatrix, path) -> None:
    """CSV: item ids, then labels (blank when unknown), then the square matrix."""
    atomic_write_text(path, format_matrix(matrix))


def read_matrix(path) -> DistanceMatrix:
    path = Path(path)
    rows = list(csv.reader(io.StringIO(path.read_text(encoding="utf-8"))))
    rows = [r for r in rows if r]
    if len(rows) < 3:
        raise ParseError("need an id row, a label row and at least one matrix row", path)
    ids, labels = rows[0], rows[1]
    n = len(ids)
    if len(labels) != n:
        raise ParseError(f"{len(labels)} labels for {n} ids", path, 2)
    body = rows[2:]
    if len(body) != n:
        raise ParseError(f"{len(body)} matrix rows for {n} ids", path)
    entries = np.empty((n, n))
    for r, row in enumerate(body):
        if len(row) != n:
            raise ParseError(f"row has {len(row)} entries, expected {n}", path, r + 3)
        try:
            entries[r] = [float(x) for x in row]
        except ValueError as exc:
            raise ParseError(str(exc), path, r + 3) from None
    labs = None if all(lab == "" for lab in labels) else tuple(labels)
    try:
        return DistanceMatrix(entries, tuple(ids), labs)
    except ValueError as exc:
        raise ParseError(str(exc), path) from None


def write_report(report: EvaluationReport, path, extra: Optional[dict] = None) -> None:
    data = report.to_dict()
    if extra:
        data.update(extra)
    atomic_write_text(path, json.dumps(data, indent=2) + "\n")
