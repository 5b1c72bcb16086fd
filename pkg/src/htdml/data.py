"""Datasets: labeled pair constraints, cross-domain correspondences and
class-labeled point sets, plus CSV ingestion.

Samples are stored as rows of a float64 array.  All containers freeze their
arrays after construction.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (AlignmentError, DimensionError, EmptyInputError,
                     FormatError, LabelError, PairIndexError, ParseError)


def _frozen(a, dtype=np.float64):
    a = np.array(a, dtype=dtype, copy=True)
    a.flags.writeable = False
    return a


def _check_samples(X, name="samples"):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionError(f"{name} must be a 2-D array, got shape {X.shape}")
    if X.shape[1] == 0:
        raise DimensionError(f"{name} have dimension 0")
    if not np.all(np.isfinite(X)):
        raise ParseError(f"{name} contain non-finite values")
    return X


@dataclass(frozen=True, eq=False)
class LabeledPairSet:
    """Weak supervision for one domain: pairs ``(x1, x2, y)`` with y = +1 for
    similar and -1 for dissimilar.

    Pairs reference rows of ``samples`` by index; ``deltas`` and
    ``delta_inf`` are cached at construction.
    """

    samples: np.ndarray
    index: np.ndarray
    y: np.ndarray
    deltas: np.ndarray = field(init=False)
    delta_inf: np.ndarray = field(init=False)

    def __post_init__(self):
        X = _check_samples(self.samples)
        idx = np.asarray(self.index)
        if idx.size == 0:
            idx = idx.reshape(0, 2)
        if idx.ndim != 2 or idx.shape[1] != 2:
            raise DimensionError(f"pair index must have shape (N, 2), got {idx.shape}")
        if not np.issubdtype(idx.dtype, np.integer):
            raise PairIndexError("pair indices must be integers")
        y = np.asarray(self.y)
        if y.shape != (idx.shape[0],):
            raise DimensionError("one label per pair required")
        bad = (idx < 0) | (idx >= X.shape[0])
        if bad.any():
            row = int(np.argwhere(bad)[0, 0])
            raise PairIndexError(
                f"pair {row} references sample {int(idx[row][bad[row]][0])}, "
                f"but only {X.shape[0]} samples exist")
        if not np.all((y == 1) | (y == -1)):
            row = int(np.argwhere((y != 1) & (y != -1))[0, 0])
            raise LabelError(f"pair {row} has label {y[row]!r}; expected +1 or -1")
        deltas = X[idx[:, 0]] - X[idx[:, 1]]
        object.__setattr__(self, "samples", _frozen(X))
        object.__setattr__(self, "index", _frozen(idx, np.int64))
        object.__setattr__(self, "y", _frozen(y))
        object.__setattr__(self, "deltas", _frozen(deltas))
        object.__setattr__(self, "delta_inf",
                           _frozen(np.abs(deltas).max(axis=1) if len(deltas)
                                   else np.zeros(0)))

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    @property
    def x1(self) -> np.ndarray:
        return self.samples[self.index[:, 0]]

    @property
    def x2(self) -> np.ndarray:
        return self.samples[self.index[:, 1]]

    def __len__(self):
        return self.index.shape[0]


@dataclass(frozen=True, eq=False)
class CorrespondenceSet:
    """Unlabeled objects observed in both domains; row n of ``source`` and
    row n of ``target`` describe the same object."""

    source: np.ndarray
    target: np.ndarray

    def __post_init__(self):
        S = np.asarray(self.source, dtype=np.float64)
        T = np.asarray(self.target, dtype=np.float64)
        if S.ndim != 2 or T.ndim != 2:
            raise DimensionError("correspondence views must be 2-D arrays")
        if S.shape[0] != T.shape[0]:
            raise AlignmentError(S.shape[0], T.shape[0])
        if S.shape[0] == 0:
            raise EmptyInputError("at least one correspondence is required")
        _check_samples(S, "source samples")
        _check_samples(T, "target samples")
        object.__setattr__(self, "source", _frozen(S))
        object.__setattr__(self, "target", _frozen(T))

    @property
    def count(self) -> int:
        return self.source.shape[0]

    def __len__(self):
        return self.count


@dataclass(frozen=True, eq=False)
class LabeledPointSet:
    """Points with class ids 0..K-1, used for kNN evaluation."""

    X: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        X = _check_samples(self.X, "points")
        labels = np.asarray(self.labels)
        if labels.shape != (X.shape[0],):
            raise DimensionError("one class id per point required")
        if X.shape[0] == 0:
            raise EmptyInputError("point set is empty")
        if not np.issubdtype(labels.dtype, np.integer):
            if not np.all(labels == np.round(labels)):
                raise LabelError("class ids must be integers")
            labels = labels.astype(np.int64)
        present = np.unique(labels)
        if present[0] < 0 or present[-1] != len(present) - 1:
            raise LabelError(
                f"class ids must be contiguous from 0, got {present.tolist()}")
        object.__setattr__(self, "X", _frozen(X))
        object.__setattr__(self, "labels", _frozen(labels, np.int64))

    @property
    def n_classes(self) -> int:
        return int(self.labels.max()) + 1

    def __len__(self):
        return self.X.shape[0]


def _read_rows(path):
    """Yield ``(line_number, [cells])`` for each non-comment, non-blank line."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            yield lineno, [c.strip() for c in s.split(",")]


def load_samples(path) -> np.ndarray:
    """Read a sample CSV into an ``(n, d)`` float64 array.

    Lines starting with ``#`` are ignored.  Raises :class:`FormatError` for
    ragged rows, :class:`ParseError` for non-numeric cells and
    :class:`EmptyInputError` when no data rows are present.
    """
    rows = []
    width = None
    for lineno, cells in _read_rows(path):
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise FormatError(f"expected {width} values, found {len(cells)}", line=lineno)
        try:
            vals = [float(c) for c in cells]
        except ValueError:
            raise ParseError(f"non-numeric cell in {cells!r}", line=lineno) from None
        if not all(np.isfinite(vals)):
            raise ParseError("non-finite value", line=lineno)
        rows.append(vals)
    if not rows:
        raise EmptyInputError(f"{path}: no data rows")
    return np.array(rows, dtype=np.float64)


def load_pairs(path) -> tuple[np.ndarray, np.ndarray]:
    """Read an ``i,j,y`` pair file into index and label arrays."""
    idx, ys = [], []
    for lineno, cells in _read_rows(path):
        if len(cells) != 3:
            raise FormatError(f"pair rows need 3 fields, found {len(cells)}", line=lineno)
        try:
            i, j, y = (int(c) for c in cells)
        except ValueError:
            raise ParseError(f"non-integer field in {cells!r}", line=lineno) from None
        if y not in (1, -1):
            raise LabelError(f"line {lineno}: label {y} is not +1 or -1")
        idx.append((i, j))
        ys.append(y)
    if not idx:
        raise EmptyInputError(f"{path}: no pair rows")
    return np.array(idx, dtype=np.int64), np.array(ys, dtype=np.float64)


def load_pair_dataset(samples_path, pairs_path) -> LabeledPairSet:
    samples = load_samples(samples_path)
    idx, y = load_pairs(pairs_path)
    return LabeledPairSet(samples, idx, y)


def load_correspondences(source_path, target_path) -> CorrespondenceSet:
    S = load_samples(source_path)
    T = load_samples(target_path)
    return CorrespondenceSet(S, T)


def load_labels(path) -> np.ndarray:
    labels = []
    for lineno, cells in _read_rows(path):
        if len(cells) != 1:
            raise FormatError("label rows hold a single class id", line=lineno)
        try:
            labels.append(int(cells[0]))
        except ValueError:
            raise ParseError(f"bad class id {cells[0]!r}", line=lineno) from None
    if not labels:
        raise EmptyInputError(f"{path}: no labels")
    return np.array(labels, dtype=np.int64)


def load_point_set(samples_path, labels_path) -> LabeledPointSet:
    X = load_samples(samples_path)
    labels = load_labels(labels_path)
    if len(labels) != len(X):
        raise AlignmentError(len(X), len(labels))
    return LabeledPointSet(X, labels)


def save_samples(X, path, header=None):
    X = np.asarray(X, dtype=np.float64)
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(f"# {header}\n")
        for row in X:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def save_pairs(pairs: LabeledPairSet, path):
    with open(path, "w", encoding="utf-8") as fh:
        for (i, j), y in zip(pairs.index, pairs.y):
            fh.write(f"{int(i)},{int(j)},{int(y)}\n")


def save_pair_dataset(pairs: LabeledPairSet, samples_path, pairs_path):
    save_samples(pairs.samples, samples_path, header=f"d={pairs.dim}")
    save_pairs(pairs, pairs_path)


def save_correspondences(corr: CorrespondenceSet, source_path, target_path):
    save_samples(corr.source, source_path, header=f"d={corr.source.shape[1]}")
    save_samples(corr.target, target_path, header=f"d={corr.target.shape[1]}")


def save_point_set(points: LabeledPointSet, samples_path, labels_path):
    save_samples(points.X, samples_path, header=f"d={points.X.shape[1]}")
    Path(labels_path).write_text(
        "".join(f"{int(c)}\n" for c in points.labels), encoding="utf-8")
