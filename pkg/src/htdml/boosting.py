"""Nonlinear target mapping: a linear map refined by boosted regression
trees fit to the negative functional gradient of the smoothed objective."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError, EmptyInputError
from .linear import LinearMap, TrainTrace, _fragment_values, objective_from_mapped
from .losses import smoothed_abs_batch, smoothed_hinge_batch
from .trees import fit_tree

log = logging.getLogger(__name__)

DEFAULT_TREES = 100
DEFAULT_ALPHA = 0.01
DEFAULT_DEPTH = 4


@dataclass(frozen=True)
class BoostParams:
    n_trees: int = DEFAULT_TREES
    alpha: float = DEFAULT_ALPHA
    depth: int = DEFAULT_DEPTH

    def __post_init__(self):
        if int(self.n_trees) != self.n_trees or self.n_trees < 1:
            raise ConfigError("n_trees must be a positive integer")
        if not self.alpha >= 0:
            raise ConfigError("alpha must be >= 0")
        if int(self.depth) != self.depth or self.depth < 0:
            raise ConfigError("depth must be a nonnegative integer")


@dataclass(frozen=True, eq=False)
class BoostedMap:
    """``phi(x) = x @ U + alpha * sum_t tree_t(x)``."""

    init: LinearMap
    trees: tuple = ()
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self):
        object.__setattr__(self, "trees", tuple(self.trees))
        for t in self.trees:
            if t.r != self.init.r:
                raise DimensionError(f"tree output dimension {t.r} != {self.init.r}")

    @property
    def d(self) -> int:
        return self.init.d

    @property
    def r(self) -> int:
        return self.init.r

    def tree_sum(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        S = np.zeros((X.shape[0], self.r))
        for t in self.trees:
            S += t.predict(X)
        return S

    def apply(self, X):
        X = np.asarray(X, dtype=np.float64)
        lin = self.init.apply(X)
        if X.ndim == 1:
            return lin + self.alpha * self.tree_sum(X)[0]
        return lin + self.alpha * self.tree_sum(X)


def apply_boosted(model: BoostedMap, x):
    return model.apply(x)


@dataclass(frozen=True, eq=False)
class GradientTable:
    """Distinct training points with their negative-gradient residuals."""

    points: np.ndarray
    residuals: np.ndarray


class _PointProblem:
    """Objective written over the mapped values of the distinct points.

    Pair endpoints and unlabeled samples are merged into one deduplicated
    point table; ``a``/``b`` index pair endpoints and ``u`` the unlabeled
    samples inside it.
    """

    def __init__(self, pairs, corr, F_S, graph, hyper):
        if len(pairs) == 0:
            raise EmptyInputError("at least one labeled pair is required")
        if hyper.gamma > 0 and F_S is None:
            raise ConfigError("gamma > 0 requires a fragment matrix")
        if hyper.gamma_i > 0 and graph is None:
            raise ConfigError("gamma_i > 0 requires a neighbour graph")
        self.pairs, self.corr, self.hyper = pairs, corr, hyper
        self.graph = graph if hyper.gamma_i > 0 else None
        self.F = _fragment_values(F_S) if hyper.gamma > 0 else None
        XU = corr.target
        if XU.shape[1] != pairs.dim:
            raise DimensionError(
                f"unlabeled samples have dimension {XU.shape[1]}, pairs {pairs.dim}")
        if self.F is not None and self.F.shape != (hyper.r, corr.count):
            raise DimensionError(
                f"fragment matrix shape {self.F.shape} != ({hyper.r}, {corr.count})")
        if self.graph is not None and self.graph.n_nodes != corr.count:
            raise DimensionError("graph size does not match the unlabeled samples")
        used = np.unique(pairs.index)
        stacked = np.vstack([pairs.samples[used], XU])
        self.points, inverse = np.unique(stacked, axis=0, return_inverse=True)
        inverse = inverse.ravel()
        lookup = np.full(pairs.samples.shape[0], -1, dtype=np.int64)
        lookup[used] = inverse[:used.size]
        self.a = lookup[pairs.index[:, 0]]
        self.b = lookup[pairs.index[:, 1]]
        self.u = inverse[used.size:]

    def objective(self, phi) -> float:
        h = self.hyper
        Phi_U = phi[self.u] if (h.gamma > 0 or h.gamma_i > 0) else None
        return objective_from_mapped(phi[self.a] - phi[self.b], self.pairs.y,
                                     self.pairs.delta_inf, Phi_U, self.F,
                                     self.graph, h)

    def gradient(self, phi) -> np.ndarray:
        """d objective / d phi(point), one row per distinct point."""
        h = self.hyper
        grad = np.zeros_like(phi)
        diff = phi[self.a] - phi[self.b]
        dq = np.einsum("ij,ij->i", diff, diff)
        _, nu = smoothed_hinge_batch(self.pairs.y, dq, self.pairs.delta_inf, h.sigma)
        g = ((2.0 / len(self.pairs)) * self.pairs.y * nu)[:, None] * diff
        np.add.at(grad, self.a, g)
        np.add.at(grad, self.b, -g)
        n = self.corr.count
        if h.gamma > 0:
            _, q = smoothed_abs_batch(phi[self.u] - self.F.T, h.sigma)
            np.add.at(grad, self.u, (h.gamma / n) * q)
        if h.gamma_i > 0:
            LPhi = self.graph.laplacian @ phi[self.u]
            np.add.at(grad, self.u, (4.0 * h.gamma_i / (n * n)) * LPhi)
        return grad


def boosted_objective(model, pairs, corr, F_S, graph, hyper) -> float:
    """Smoothed objective of a linear or boosted map.

    Pair differences are formed as ``delta @ U + alpha * (S(x1) - S(x2))``
    so that a boosted map without trees reproduces the linear objective
    exactly.
    """
    if isinstance(model, LinearMap):
        model = BoostedMap(model, (), 0.0)
    need_u = hyper.gamma > 0 or hyper.gamma_i > 0
    F = _fragment_values(F_S) if hyper.gamma > 0 else None
    U = model.init.U
    pair_diff = pairs.deltas @ U
    Phi_U = corr.target @ U if need_u else None
    if model.trees:
        S1 = model.tree_sum(pairs.x1)
        S2 = model.tree_sum(pairs.x2)
        pair_diff = pair_diff + model.alpha * (S1 - S2)
        if need_u:
            Phi_U = Phi_U + model.alpha * model.tree_sum(corr.target)
    return objective_from_mapped(pair_diff, pairs.y, pairs.delta_inf, Phi_U, F,
                                 graph if hyper.gamma_i > 0 else None, hyper)


def negative_gradients(model, pairs, corr, F_S, graph, hyper) -> GradientTable:
    prob = _PointProblem(pairs, corr, F_S, graph, hyper)
    phi = np.asarray(model.apply(prob.points), dtype=np.float64)
    return GradientTable(prob.points, -prob.gradient(phi))


def boost_train(init, pairs, corr, F_S, graph, hyper, n_trees=DEFAULT_TREES,
                alpha=DEFAULT_ALPHA, depth=DEFAULT_DEPTH):
    """Greedily add ``n_trees`` regression trees to a linear initialisation.

    Every round recomputes the residuals at the current mapping, fits one
    multi-output tree of depth ``depth`` to them, and adds it with rate
    ``alpha``.  The trace holds the smoothed objective after each tree.
    """
    BoostParams(n_trees, alpha, depth)
    if init.r != hyper.r:
        raise DimensionError(f"init has r={init.r}, hyper-parameters r={hyper.r}")
    prob = _PointProblem(pairs, corr, F_S, graph, hyper)
    P = prob.points
    lin_points = P @ init.U
    S_points = np.zeros_like(lin_points)
    # running tree sums at the objective's evaluation sites
    S1 = np.zeros((len(pairs), init.r))
    S2 = np.zeros_like(S1)
    SU = np.zeros((corr.count, init.r))
    x1, x2 = pairs.x1, pairs.x2
    trees = []
    model = BoostedMap(init, (), alpha)
    trace = TrainTrace(initial_objective=boosted_objective(model, pairs, corr, F_S,
                                                           graph, hyper))
    need_u = hyper.gamma > 0 or hyper.gamma_i > 0
    F = _fragment_values(F_S) if hyper.gamma > 0 else None
    base_diff = pairs.deltas @ init.U
    base_U = corr.target @ init.U if need_u else None
    g_graph = graph if hyper.gamma_i > 0 else None
    for t in range(n_trees):
        phi = lin_points + alpha * S_points
        residual = -prob.gradient(phi)
        tree = fit_tree(P, residual, depth)
        trees.append(tree)
        S_points += tree.predict(P)
        S1 += tree.predict(x1)
        S2 += tree.predict(x2)
        if need_u:
            SU += tree.predict(corr.target)
        pair_diff = base_diff + alpha * (S1 - S2)
        Phi_U = base_U + alpha * SU if need_u else None
        value = objective_from_mapped(pair_diff, pairs.y, pairs.delta_inf, Phi_U, F,
                                      g_graph, hyper)
        trace.record(trace.final_objective, value, alpha, float("nan"),
                     np.linalg.norm(residual))
    trace.status = "completed"
    log.debug("boost_train: %d trees, objective %.6g -> %.6g", n_trees,
              trace.initial_objective, trace.final_objective)
    return BoostedMap(init, tuple(trees), alpha), trace
