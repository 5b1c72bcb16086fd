"""Neighbour graph over the unlabeled target samples and the manifold
regulariser built on it."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.spatial import cKDTree

from .errors import (ConfigError, DegenerateBandwidthError, DimensionError,
                     EmptyInputError)

DEFAULT_K = 7


@dataclass(frozen=True, eq=False)
class NeighborGraph:
    """Symmetric k-NN heat-kernel graph.

    ``weights`` and ``laplacian`` are CSR matrices; ``L = D - W``.
    """

    weights: sp.csr_matrix
    laplacian: sp.csr_matrix
    bandwidth: float
    k: int

    @property
    def n_nodes(self) -> int:
        return self.weights.shape[0]


def default_bandwidth(samples) -> float:
    """Average squared distance over all ordered pairs (i = j included).

    Uses ``(1/N^2) sum_ij |x_i - x_j|^2 = (2/N) sum_i |x_i - mean|^2``.
    """
    X = np.asarray(samples, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise EmptyInputError("need at least two samples to set a bandwidth")
    if np.all(X == X[0]):
        raise DegenerateBandwidthError("all samples are identical")
    centered = X - X.mean(axis=0)
    return float(2.0 * np.einsum("ij,ij->", centered, centered) / X.shape[0])


def heat_kernel(sq_dist, bandwidth):
    return np.exp(-np.asarray(sq_dist) / (2.0 * bandwidth * bandwidth))


def build_neighbor_graph(samples, k=DEFAULT_K, bandwidth=None) -> NeighborGraph:
    """Connect each sample to its ``k`` nearest Euclidean neighbours.

    An edge exists if either endpoint lists the other; weights are
    ``exp(-|x_i - x_j|^2 / (2 bandwidth^2))`` and the diagonal is zero.
    """
    X = np.asarray(samples, dtype=np.float64)
    n = X.shape[0]
    if not 0 < k < n:
        raise ConfigError(f"k must satisfy 0 < k < N ({n}), got {k}")
    if bandwidth is None:
        bandwidth = default_bandwidth(X)
    if not bandwidth > 0:
        raise ConfigError(f"bandwidth must be positive, got {bandwidth}")

    _, nbr = cKDTree(X).query(X, k=k + 1)
    nbr = np.asarray(nbr).reshape(n, k + 1)
    rows = np.repeat(np.arange(n), k)
    cols = np.empty(n * k, dtype=np.int64)
    for i in range(n):
        cand = nbr[i][nbr[i] != i]
        cols[i * k:(i + 1) * k] = cand[:k]
    diff = X[rows] - X[cols]
    w = heat_kernel(np.einsum("ij,ij->i", diff, diff), bandwidth)
    W = sp.csr_matrix((w, (rows, cols)), shape=(n, n))
    W = W.maximum(W.T).tocsr()
    W.setdiag(0.0)
    W.eliminate_zeros()
    W.sort_indices()
    degree = np.asarray(W.sum(axis=1)).ravel()
    L = (sp.diags(degree) - W).tocsr()
    L.sort_indices()
    return NeighborGraph(W, L, float(bandwidth), int(k))


def laplacian_quadratic(Phi, graph) -> float:
    """``sum_ij w_ij |phi_i - phi_j|^2`` for mapped points given as rows."""
    Phi = np.asarray(Phi, dtype=np.float64)
    return max(0.0, 2.0 * float(np.einsum("ij,ij->", Phi, graph.laplacian @ Phi)))


def manifold_value_grad(U, X_U, graph):
    """Manifold regulariser for a linear map and its gradient.

    ``X_U`` stores samples as columns.  The value is the double sum
    ``sum_ij w_ij |U^T (x_i - x_j)|^2 = 2 tr(U^T X L X^T U)``; the gradient of
    that value is ``4 X L X^T U``.
    """
    U = np.asarray(U, dtype=np.float64)
    X_U = np.asarray(X_U, dtype=np.float64)
    if U.shape[0] != X_U.shape[0] or X_U.shape[1] != graph.n_nodes:
        raise DimensionError(
            f"shape mismatch: U {U.shape}, X_U {X_U.shape}, graph {graph.n_nodes} nodes")
    Phi = X_U.T @ U
    LPhi = graph.laplacian @ Phi
    value = max(0.0, 2.0 * float(np.einsum("ij,ij->", Phi, LPhi)))
    return value, 4.0 * (X_U @ LPhi)
