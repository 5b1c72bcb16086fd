"""Multi-output CART regression trees fit by greedy least squares."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DimensionError, EmptyInputError

# splits must beat the parent by this fraction of the node's sum of squares
_GAIN_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class RegressionTree:
    """Array-encoded binary tree in preorder.

    Internal nodes have ``feature >= 0`` and route a sample left iff
    ``x[feature] <= threshold``; leaves have ``feature == -1`` and emit
    ``value[node]``.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    def __post_init__(self):
        for name, dt in [("feature", np.int64), ("threshold", np.float64),
                         ("left", np.int64), ("right", np.int64),
                         ("value", np.float64)]:
            a = np.array(getattr(self, name), dtype=dt)
            a.flags.writeable = False
            object.__setattr__(self, name, a)
        if self.value.ndim != 2 or self.value.shape[0] != self.feature.shape[0]:
            raise DimensionError("every node needs a value row")

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    @property
    def r(self) -> int:
        return self.value.shape[1]

    @property
    def depth(self) -> int:
        def walk(node):
            if self.feature[node] < 0:
                return 0
            return 1 + max(walk(self.left[node]), walk(self.right[node]))
        return walk(0)

    def leaves(self, X) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        return kernels.route(X, self.feature, self.threshold, self.left, self.right)

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        single = X.ndim == 1
        X2 = np.atleast_2d(X)
        out = self.value[self.leaves(X2)]
        return out[0] if single else out

    @classmethod
    def leaf(cls, value) -> "RegressionTree":
        v = np.asarray(value, dtype=np.float64).reshape(1, -1)
        return cls([-1], [0.0], [-1], [-1], v)


def fit_tree(points, targets, depth, min_leaf=1) -> RegressionTree:
    """Fit a tree of depth at most ``depth`` to vector targets.

    Each node takes the (feature, threshold) split that minimises the
    children's total squared error, considering midpoints between consecutive
    distinct feature values.  Ties go to the lowest feature index, then the
    lowest threshold.  Leaves predict the mean target of their samples.
    """
    X = np.ascontiguousarray(points, dtype=np.float64)
    Y = np.ascontiguousarray(targets, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise EmptyInputError("fit_tree needs at least one point")
    if Y.ndim == 1:
        Y = Y.reshape(-1, 1)
    if Y.shape[0] != X.shape[0]:
        raise DimensionError("one target per point required")

    feature, threshold, left, right, value = [], [], [], [], []

    def grow(idx, level):
        node = len(feature)
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(Y[idx].mean(axis=0))
        n = idx.shape[0]
        if level >= depth or n < 2 * min_leaf:
            return node
        f, thr, score = kernels.best_split(X, Y, idx, min_leaf)
        if f < 0:
            return node
        total = Y[idx].sum(axis=0)
        gain = score - float(total @ total) / n
        sumsq = float(np.einsum("ij,ij->", Y[idx], Y[idx]))
        if not gain > _GAIN_RTOL * sumsq:
            return node
        go_left = X[idx, f] <= thr
        feature[node] = f
        threshold[node] = thr
        left[node] = grow(idx[go_left], level + 1)
        right[node] = grow(idx[~go_left], level + 1)
        return node

    grow(np.arange(X.shape[0], dtype=np.int64), 0)
    return RegressionTree(feature, threshold, left, right, np.array(value))
