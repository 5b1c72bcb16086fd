"""Shared builders for small random problem instances."""
import numpy as np

from htdml.data import CorrespondenceSet, LabeledPairSet
from htdml.graph import build_neighbor_graph
from htdml.linear import HyperParams

KINK_GAP = 1e-3


def random_pairs(rng, n_samples, d, n_pairs, scale=1.0):
    X = scale * rng.normal(size=(n_samples, d))
    idx = np.empty((n_pairs, 2), dtype=np.int64)
    for i in range(n_pairs):
        idx[i] = rng.choice(n_samples, size=2, replace=False)
    y = rng.choice([-1.0, 1.0], size=n_pairs)
    return LabeledPairSet(X, idx, y)


def random_instance(seed, d=5, r=3, n_pairs=20, n_u=15, gamma=1.0, gamma_i=1.0,
                    sigma=0.5):
    """Pairs, unlabeled samples (d x N), fragments, graph, hyper and a
    nonnegative U, all drawn from ``seed``."""
    rng = np.random.default_rng(seed)
    pairs = random_pairs(rng, 2 * n_pairs, d, n_pairs, scale=0.4)
    XU = rng.normal(size=(n_u, d))
    src = rng.normal(size=(n_u, 4))
    corr = CorrespondenceSet(src, XU)
    F = rng.normal(size=(r, n_u))
    graph = build_neighbor_graph(XU, k=3)
    hyper = HyperParams(gamma=gamma, gamma_i=gamma_i, sigma=sigma, r=r)
    U = rng.random((d, r))
    return pairs, XU.T, F, graph, hyper, U, corr


def away_from_kinks(pairs, U, F, XU, sigma, gap=KINK_GAP, phi_pairs=None, phi_u=None):
    """True when every smoothing branch argument is at least ``gap`` from a
    branch boundary."""
    diff = pairs.deltas @ U if phi_pairs is None else phi_pairs
    dq = np.einsum("ij,ij->i", diff, diff)
    a = pairs.y * (1.0 - dq)
    s = sigma * pairs.delta_inf
    hinge_ok = np.all(np.minimum(np.abs(a), np.abs(a + s)) > gap)
    Phi = XU.T @ U if phi_u is None else phi_u
    z = Phi.T - F
    abs_ok = np.all(np.minimum(np.abs(np.abs(z) - sigma), np.abs(z)) > gap)
    return bool(hinge_ok and abs_ok)


def kink_free_instance(seed, **kw):
    """First instance at or after ``seed`` that stays clear of branch kinks."""
    for s in range(seed, seed + 10_000):
        inst = random_instance(s, **kw)
        pairs, XU, F, graph, hyper, U, _ = inst
        if away_from_kinks(pairs, U, F, XU, hyper.sigma):
            return inst
    raise RuntimeError("no kink-free instance found")


def rel_err(a, b):
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300))
