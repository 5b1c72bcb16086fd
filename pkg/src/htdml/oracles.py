"""Brute-force oracles: central finite differences and grid maximisation of
the smoothing problems.  Deliberately independent of the closed forms."""
import numpy as np

from .errors import ConfigError


def fd_gradient(objective, U, h=1e-5):
    """Entrywise central differences ``(f(U + h e_ij) - f(U - h e_ij)) / 2h``."""
    if not h > 0:
        raise ConfigError("finite-difference step must be positive")
    U = np.array(U, dtype=np.float64)
    G = np.zeros_like(U)
    for ij in np.ndindex(U.shape):
        orig = U[ij]
        U[ij] = orig + h
        fp = objective(U)
        U[ij] = orig - h
        fm = objective(U)
        U[ij] = orig
        G[ij] = (fp - fm) / (2.0 * h)
    return G


def smoothed_loss_oracle(kind, inputs, sigma, grid_n=10_000, chunk=256):
    """Maximise the smoothing problem over a uniform grid of the dual box.

    ``kind="hinge"``: ``inputs`` is ``(y, delta_quad, delta_inf)`` (scalars or
    arrays); maximises ``nu * (-y (1 - delta_quad)) - sigma/2 delta_inf nu^2``
    over nu in [0, 1].  ``kind="abs"``: ``inputs`` is z; maximises
    ``z q - sigma/2 q^2`` over q in [-1, 1].
    """
    if grid_n < 1000:
        raise ConfigError("grid_n must be at least 1000")
    if kind == "hinge":
        y, dq, dinf = (np.atleast_1d(np.asarray(v, dtype=np.float64)) for v in inputs)
        y, dq, dinf = np.broadcast_arrays(y, dq, dinf)
        lin = -y * (1.0 - dq)
        quad = 0.5 * sigma * dinf
        grid = np.linspace(0.0, 1.0, grid_n)
    elif kind == "abs":
        lin = np.atleast_1d(np.asarray(inputs, dtype=np.float64))
        quad = np.full_like(lin, 0.5 * sigma)
        # odd point count so that q = 0 lies on the grid
        grid = np.linspace(-1.0, 1.0, grid_n | 1)
    else:
        raise ConfigError(f"unknown loss kind {kind!r}")
    out = np.empty(lin.shape[0])
    g2 = grid * grid
    for s in range(0, lin.shape[0], chunk):
        l, q = lin[s:s + chunk, None], quad[s:s + chunk, None]
        out[s:s + chunk] = (l * grid - q * g2).max(axis=1)
    scalar = np.ndim(inputs if kind == "abs" else inputs[0]) == 0
    return float(out[0]) if scalar and out.size == 1 else out
