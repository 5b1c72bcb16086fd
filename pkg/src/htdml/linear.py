"""Linear target metric: smoothed objective, its gradient, and the projected
gradient solver with sufficient-decrease backtracking."""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from . import graph as _graph
from .errors import (ConfigError, DimensionError, EmptyInputError,
                     NonFiniteError, StagnationError)
from .losses import (DEFAULT_SIGMA, hinge_grad_accum, l1_grad,
                     smoothed_abs_batch, smoothed_hinge_batch)

log = logging.getLogger(__name__)

MIN_STEP = 1e-20


@dataclass(frozen=True)
class HyperParams:
    gamma: float = 1.0
    gamma_i: float = 10.0
    sigma: float = DEFAULT_SIGMA
    rho: float = 0.01
    eps_stop: float = 1e-5
    max_iter: int = 500
    r: int = 5
    seed: int = 0
    beta: float = 0.1
    k_neighbors: int = _graph.DEFAULT_K

    def __post_init__(self):
        checks = [
            (self.gamma >= 0, "gamma must be >= 0"),
            (self.gamma_i >= 0, "gamma_i must be >= 0"),
            (self.sigma > 0, "sigma must be > 0"),
            (0 < self.rho < 1, "rho must lie in (0, 1)"),
            (self.eps_stop > 0, "eps_stop must be > 0"),
            (int(self.max_iter) == self.max_iter and self.max_iter >= 1,
             "max_iter must be a positive integer"),
            (int(self.r) == self.r and self.r >= 1, "r must be a positive integer"),
            (int(self.seed) == self.seed and self.seed >= 0,
             "seed must be a non-negative integer"),
            (0 < self.beta < 1, "beta must lie in (0, 1)"),
            (int(self.k_neighbors) == self.k_neighbors and self.k_neighbors >= 1,
             "k_neighbors must be a positive integer"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)

    def replace(self, **changes) -> "HyperParams":
        return HyperParams(**{**asdict(self), **changes})

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True, eq=False)
class LinearMap:
    """Nonnegative ``d x r`` matrix U; maps a row sample x to ``x @ U``."""

    U: np.ndarray

    def __post_init__(self):
        U = np.array(self.U, dtype=np.float64)
        if U.ndim != 2:
            raise DimensionError(f"U must be 2-D, got shape {U.shape}")
        if not np.all(np.isfinite(U)) or np.any(U < 0):
            raise ConfigError("LinearMap entries must be finite and nonnegative")
        U.flags.writeable = False
        object.__setattr__(self, "U", U)

    @property
    def d(self) -> int:
        return self.U.shape[0]

    @property
    def r(self) -> int:
        return self.U.shape[1]

    def apply(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.shape[-1] != self.d:
            raise DimensionError(f"input dimension {X.shape[-1]} != {self.d}")
        return X @ self.U

    def metric(self) -> np.ndarray:
        """The Mahalanobis matrix ``U U^T``."""
        return self.U @ self.U.T


@dataclass
class TrainTrace:
    """Per-iteration solver record.

    ``inner[t]`` is the Frobenius product of the gradient with the accepted
    step, so the sufficient-decrease test reads
    ``objective[t] - objective_before[t] <= rho * inner[t]``.
    """

    initial_objective: float
    objective: list = field(default_factory=list)
    objective_before: list = field(default_factory=list)
    step: list = field(default_factory=list)
    inner: list = field(default_factory=list)
    grad_norm: list = field(default_factory=list)
    status: str = "running"

    def record(self, before, after, step, inner, grad_norm):
        self.objective_before.append(float(before))
        self.objective.append(float(after))
        self.step.append(float(step))
        self.inner.append(float(inner))
        self.grad_norm.append(float(grad_norm))

    @property
    def n_iter(self) -> int:
        return len(self.objective)

    @property
    def final_objective(self) -> float:
        return self.objective[-1] if self.objective else self.initial_objective

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("iteration,objective,step,inner,grad_norm\n")
            fh.write(f"0,{self.initial_objective!r},,,\n")
            for t in range(self.n_iter):
                fh.write(f"{t + 1},{self.objective[t]!r},{self.step[t]!r},"
                         f"{self.inner[t]!r},{self.grad_norm[t]!r}\n")


def project_nonneg(V):
    """Clip every negative entry to zero."""
    return np.maximum(np.asarray(V, dtype=np.float64), 0.0)


def _fragment_values(F_S):
    return np.asarray(getattr(F_S, "values", F_S), dtype=np.float64)


def objective_from_mapped(pair_diff, y, delta_inf, Phi_U, F, graph, hyper):
    """Smoothed objective given mapped quantities.

    ``pair_diff`` holds ``phi(x1) - phi(x2)`` per pair (rows), ``Phi_U`` the
    mapped unlabeled samples (rows) and ``F`` the ``r x N`` fragment matrix.
    Shared by the linear and boosted models so both evaluate the same
    arithmetic.
    """
    dq = np.einsum("ij,ij->i", pair_diff, pair_diff)
    hinge, _ = smoothed_hinge_batch(y, dq, delta_inf, hyper.sigma)
    value = float(hinge.sum()) / len(y)
    if hyper.gamma > 0:
        h, _ = smoothed_abs_batch(Phi_U.T - F, hyper.sigma)
        value += hyper.gamma * float(h.sum()) / Phi_U.shape[0]
    if hyper.gamma_i > 0:
        n = Phi_U.shape[0]
        value += hyper.gamma_i * _graph.laplacian_quadratic(Phi_U, graph) / (n * n)
    return value


class LinearProblem:
    """Training data bundled for repeated objective/gradient evaluation.

    ``X_U`` holds unlabeled target samples as columns (``d x N``).
    """

    def __init__(self, pairs, X_U, F_S, graph, hyper):
        if len(pairs) == 0:
            raise EmptyInputError("at least one labeled pair is required")
        if hyper.gamma > 0 and F_S is None:
            raise ConfigError("gamma > 0 requires a fragment matrix")
        if hyper.gamma_i > 0 and graph is None:
            raise ConfigError("gamma_i > 0 requires a neighbour graph")
        needs_unlabeled = hyper.gamma > 0 or hyper.gamma_i > 0
        if needs_unlabeled and X_U is None:
            raise ConfigError("transfer or manifold terms require unlabeled samples")
        self.pairs = pairs
        self.hyper = hyper
        self.X_U = None if X_U is None else np.asarray(X_U, dtype=np.float64)
        self.F = None
        self.graph = graph if hyper.gamma_i > 0 else None
        d = pairs.dim
        if self.X_U is not None and needs_unlabeled:
            if self.X_U.shape[0] != d:
                raise DimensionError(
                    f"unlabeled samples have dimension {self.X_U.shape[0]}, pairs {d}")
        if hyper.gamma > 0:
            F = _fragment_values(F_S)
            if F.shape != (hyper.r, self.X_U.shape[1]):
                raise DimensionError(
                    f"fragment matrix shape {F.shape} != ({hyper.r}, {self.X_U.shape[1]})")
            self.F = F
        if self.graph is not None and self.graph.n_nodes != self.X_U.shape[1]:
            raise DimensionError("graph size does not match the unlabeled samples")

    @property
    def shape(self):
        return (self.pairs.dim, self.hyper.r)

    def objective(self, U) -> float:
        U = np.asarray(U, dtype=np.float64)
        if U.shape != self.shape:
            raise DimensionError(f"U has shape {U.shape}; expected {self.shape}")
        pair_diff = self.pairs.deltas @ U
        Phi_U = None
        if self.hyper.gamma > 0 or self.hyper.gamma_i > 0:
            Phi_U = self.X_U.T @ U
        return objective_from_mapped(pair_diff, self.pairs.y, self.pairs.delta_inf,
                                     Phi_U, self.F, self.graph, self.hyper)

    def gradient(self, U) -> np.ndarray:
        U = np.asarray(U, dtype=np.float64)
        if U.shape != self.shape:
            raise DimensionError(f"U has shape {U.shape}; expected {self.shape}")
        h = self.hyper
        grad = hinge_grad_accum(self.pairs, U, h.sigma) / len(self.pairs)
        if h.gamma > 0:
            grad = grad + (h.gamma / self.X_U.shape[1]) * l1_grad(U, self.X_U, self.F, h.sigma)
        if h.gamma_i > 0:
            n = self.X_U.shape[1]
            _, g_mr = _graph.manifold_value_grad(U, self.X_U, self.graph)
            grad = grad + (h.gamma_i / (n * n)) * g_mr
        return grad


def objective_smoothed(U, pairs, X_U, F_S, graph, hyper) -> float:
    """Smoothed training objective of a linear map (``X_U`` is ``d x N``)."""
    return LinearProblem(pairs, X_U, F_S, graph, hyper).objective(U)


def gradient_smoothed(U, pairs, X_U, F_S, graph, hyper) -> np.ndarray:
    """Gradient of :func:`objective_smoothed` w.r.t. U."""
    return LinearProblem(pairs, X_U, F_S, graph, hyper).gradient(U)


def random_init(d, r, seed) -> np.ndarray:
    return np.random.default_rng(seed).random((d, r))


def pgm_train(pairs, X_U, F_S, graph, hyper, init=None, callback=None):
    """Minimise the smoothed objective over nonnegative U.

    Each iteration takes ``U <- max(U - mu * grad, 0)`` with ``mu`` chosen by
    backtracking from the previously accepted step: one enlargement by
    ``1/beta`` is tried when the first trial already satisfies the
    sufficient-decrease condition, otherwise ``mu`` shrinks by ``beta`` until
    it does.

    ``callback(t, U)``, if given, sees every accepted iterate.

    Returns
    -------
    LinearMap, TrainTrace

    Raises
    ------
    StagnationError
        The step size fell below 1e-20 without satisfying the condition.
    NonFiniteError
        The objective or gradient at an accepted iterate is not finite.
    """
    prob = LinearProblem(pairs, X_U, F_S, graph, hyper)
    d, r = prob.shape
    if init is None:
        U = project_nonneg(random_init(d, r, hyper.seed))
    else:
        U = np.array(init.U if isinstance(init, LinearMap) else init, dtype=np.float64)
        if U.shape != (d, r):
            raise DimensionError(f"init has shape {U.shape}; expected {(d, r)}")
        U = project_nonneg(U)

    f0 = prob.objective(U)
    if not np.isfinite(f0):
        raise NonFiniteError(f"objective at the initial iterate is {f0}")
    trace = TrainTrace(initial_objective=f0)
    f = f0
    mu = 1.0
    rho, beta = hyper.rho, hyper.beta

    def trial(step, g):
        Un = project_nonneg(U - step * g)
        fn = prob.objective(Un)
        inner = float(np.vdot(g, Un - U))
        return Un, fn, inner, bool(fn - f <= rho * inner)

    for t in range(hyper.max_iter):
        g = prob.gradient(U)
        if not np.all(np.isfinite(g)):
            raise NonFiniteError(f"non-finite gradient at iteration {t}")
        Un, fn, inner, ok = trial(mu, g)
        if ok:
            bigger = trial(mu / beta, g)
            if bigger[3]:
                mu /= beta
                Un, fn, inner, ok = bigger
        else:
            while not ok:
                mu *= beta
                if mu < MIN_STEP:
                    raise StagnationError(
                        f"line search underflow at iteration {t}", iterate=U.copy(),
                        iteration=t)
                Un, fn, inner, ok = trial(mu, g)
        trace.record(f, fn, mu, inner, np.linalg.norm(g))
        change = abs(fn - f)
        moved = abs(fn - f0)
        U, f = Un, fn
        if callback is not None:
            callback(t, U)
        if moved < 1e-15 or change / moved < hyper.eps_stop:
            trace.status = "converged"
            break
    else:
        trace.status = "max_iter"
    log.debug("pgm_train: %s after %d iterations, objective %.6g",
              trace.status, trace.n_iter, f)
    return LinearMap(U), trace
