"""Distances under a learned mapping, kNN classification, accuracy,
macro-F1 and mean average precision."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, EmptyInputError, LabelError


class IdentityMap:
    """Euclidean baseline: ``phi(x) = x``."""

    def __init__(self, d):
        self.d = d
        self.r = d

    def apply(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.shape[-1] != self.d:
            raise DimensionError(f"input dimension {X.shape[-1]} != {self.d}")
        return X.copy()


def pairwise_distance(model, x1, x2) -> float:
    """Squared Euclidean distance between mapped samples."""
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    if x1.shape != x2.shape:
        raise DimensionError(f"dimension mismatch: {x1.shape} vs {x2.shape}")
    diff = np.asarray(model.apply(x1)) - np.asarray(model.apply(x2))
    return float(np.dot(diff, diff))


def _sq_dists(A, B):
    """Squared distances between rows of A and rows of B, (len(A), len(B))."""
    diff = A[:, None, :] - B[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def _vote(labels, dists, k):
    order = np.argsort(dists, kind="stable")[:k]
    nn_labels = labels[order]
    classes, counts = np.unique(nn_labels, return_counts=True)
    best = None
    for c, cnt in zip(classes, counts):
        nearest = dists[order[nn_labels == c][0]]
        key = (-cnt, nearest, c)
        if best is None or key < best:
            best = key
    return int(best[2])


def knn_predict(train, model, queries, k=1) -> np.ndarray:
    """Predict class ids for each row of ``queries``.

    Neighbours are the k smallest mapped distances (ties by lower train
    index); vote ties go to the class whose nearest member is closest, then
    to the lower class id.
    """
    if len(train) == 0:
        raise EmptyInputError("training set is empty")
    if not 1 <= k <= len(train):
        raise DimensionError(f"k={k} must be in [1, {len(train)}]")
    Q = np.atleast_2d(np.asarray(queries, dtype=np.float64))
    mt = np.atleast_2d(model.apply(train.X))
    mq = np.atleast_2d(model.apply(Q))
    D = _sq_dists(mq, mt)
    return np.array([_vote(train.labels, D[i], k) for i in range(len(Q))], dtype=np.int64)


def knn_classify(train, model, query, k=1) -> int:
    return int(knn_predict(train, model, np.asarray(query)[None, :], k)[0])


def _check_lengths(preds, labels):
    preds = np.asarray(preds)
    labels = np.asarray(labels)
    if preds.shape != labels.shape:
        raise DimensionError(f"length mismatch: {preds.shape} vs {labels.shape}")
    if preds.size == 0:
        raise EmptyInputError("no predictions")
    return preds, labels


def accuracy(preds, labels) -> float:
    preds, labels = _check_lengths(preds, labels)
    return float(np.mean(preds == labels))


def per_class_scores(preds, labels):
    """Rows ``(class, tp, fp, fn, precision, recall, f1)`` for every class
    present in ``labels``."""
    preds, labels = _check_lengths(preds, labels)
    rows = []
    for c in np.unique(labels):
        tp = int(np.sum((preds == c) & (labels == c)))
        fp = int(np.sum((preds == c) & (labels != c)))
        fn = int(np.sum((preds != c) & (labels == c)))
        p = tp / (tp + fp) if tp + fp else 0.0
        r = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * p * r / (p + r) if p + r else 0.0
        rows.append((int(c), tp, fp, fn, p, r, f1))
    return rows


def _seq_mean(values) -> float:
    # left-to-right summation, so results do not depend on numpy's
    # pairwise-reduction blocking
    values = np.asarray(values, dtype=np.float64)
    return float(np.cumsum(values)[-1]) / values.size


def macro_f1(preds, labels) -> float:
    rows = per_class_scores(preds, labels)
    return _seq_mean([row[-1] for row in rows])


def average_precision(relevant_sorted) -> float:
    """AP of a ranked 0/1 relevance vector."""
    rel = np.asarray(relevant_sorted, dtype=bool)
    hits = np.flatnonzero(rel)
    if hits.size == 0:
        raise LabelError("no relevant items in the ranking")
    precision_at_hits = np.arange(1, hits.size + 1) / (hits + 1)
    return _seq_mean(precision_at_hits)


def mean_average_precision(queries, gallery, model) -> float:
    """Rank the gallery by mapped distance for every query (ties by lower
    gallery index) and average the per-query average precision."""
    if len(gallery) == 0:
        raise EmptyInputError("gallery is empty")
    missing = set(np.unique(queries.labels)) - set(np.unique(gallery.labels))
    if missing:
        raise LabelError(f"query classes {sorted(missing)} absent from gallery")
    D = _sq_dists(np.atleast_2d(model.apply(queries.X)),
                  np.atleast_2d(model.apply(gallery.X)))
    aps = []
    for i, c in enumerate(queries.labels):
        order = np.argsort(D[i], kind="stable")
        aps.append(average_precision(gallery.labels[order] == c))
    return _seq_mean(aps)


@dataclass
class EvalReport:
    accuracy: float
    macro_f1: float
    map_score: float | None = None
    per_class: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def to_text(self) -> str:
        lines = [f"accuracy={self.accuracy!r}", f"macro_f1={self.macro_f1!r}"]
        if self.map_score is not None:
            lines.append(f"map={self.map_score!r}")
        for c, tp, fp, fn, p, r, f1 in self.per_class:
            lines.append(f"class_{c}=tp:{tp},fp:{fp},fn:{fn},precision:{p!r},"
                         f"recall:{r!r},f1:{f1!r}")
        for key in sorted(self.config):
            lines.append(f"config.{key}={self.config[key]}")
        return "\n".join(lines) + "\n"

    def csv_header(self) -> str:
        keys = sorted(self.config)
        return ",".join(keys + ["accuracy", "macro_f1", "map"])

    def csv_row(self) -> str:
        keys = sorted(self.config)
        vals = [str(self.config[k]) for k in keys]
        vals += [repr(self.accuracy), repr(self.macro_f1),
                 "" if self.map_score is None else repr(self.map_score)]
        return ",".join(vals)


def evaluate(model, train, test, k=1, with_map=False, config=None) -> EvalReport:
    preds = knn_predict(train, model, test.X, k)
    return EvalReport(
        accuracy=accuracy(preds, test.labels),
        macro_f1=macro_f1(preds, test.labels),
        map_score=mean_average_precision(test, train, model) if with_map else None,
        per_class=per_class_scores(preds, test.labels),
        config=dict(config or {}),
    )
