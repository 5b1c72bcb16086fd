"""Smoothed hinge and absolute-value losses.

Both smoothings come from an inner maximisation over a box whose solution
is a clamp.  The scalar functions follow the piecewise closed forms; the
``*_batch`` variants are their vectorised counterparts used by the solvers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError

DEFAULT_SIGMA = 0.5


@dataclass(frozen=True)
class SmoothParams:
    sigma: float = DEFAULT_SIGMA

    def __post_init__(self):
        _check_sigma(self.sigma)


def _check_sigma(sigma):
    if not sigma > 0:
        raise ConfigError(f"smoothing parameter sigma must be positive, got {sigma}")


def smoothed_hinge(y, delta_quad, delta_inf, sigma=DEFAULT_SIGMA):
    """Smoothed hinge ``g^sigma`` for one pair.

    Parameters
    ----------
    y : {+1, -1}
        Pair label.
    delta_quad : float
        Squared mapped distance of the pair.
    delta_inf : float
        Infinity norm of the raw pair difference.
    sigma : float
        Smoothing strength.

    Returns
    -------
    value : float
    nu : float
        Maximiser of the inner problem, in ``[0, 1]``.
    """
    _check_sigma(sigma)
    a = y * (1.0 - delta_quad)
    if delta_inf == 0:
        # unsmoothed limit; delta = 0 makes the loss constant in U anyway
        return max(0.0, -a), (1.0 if -a > 0 else 0.0)
    s = sigma * delta_inf
    nu = min(max(-a / s, 0.0), 1.0)
    if a > 0:
        value = 0.0
    elif a < -s:
        value = -a - 0.5 * s
    else:
        value = a * a / (2.0 * s)
    return value, nu


def smoothed_hinge_batch(y, delta_quad, delta_inf, sigma=DEFAULT_SIGMA):
    """Vectorised :func:`smoothed_hinge`; returns ``(values, nus)`` arrays."""
    _check_sigma(sigma)
    y = np.asarray(y, dtype=np.float64)
    a = y * (1.0 - np.asarray(delta_quad, dtype=np.float64))
    dinf = np.asarray(delta_inf, dtype=np.float64)
    s = sigma * dinf
    degenerate = dinf == 0
    safe_s = np.where(degenerate, 1.0, s)
    nu = np.clip(-a / safe_s, 0.0, 1.0)
    value = np.where(a > 0, 0.0,
                     np.where(a < -s, -a - 0.5 * s, a * a / (2.0 * safe_s)))
    value = np.where(degenerate, np.maximum(0.0, -a), value)
    nu = np.where(degenerate, (-a > 0).astype(np.float64), nu)
    return value, nu


def hinge_grad_accum(pairs, U, sigma=DEFAULT_SIGMA):
    """``sum_i 2 y_i nu_i delta_i delta_i^T U`` over all pairs (not averaged)."""
    U = np.asarray(U, dtype=np.float64)
    if U.ndim != 2 or U.shape[0] != pairs.dim:
        raise DimensionError(f"U has shape {U.shape}; expected ({pairs.dim}, r)")
    P = pairs.deltas @ U
    dq = np.einsum("ij,ij->i", P, P)
    _, nu = smoothed_hinge_batch(pairs.y, dq, pairs.delta_inf, sigma)
    coef = 2.0 * pairs.y * nu
    return pairs.deltas.T @ (coef[:, None] * P)


def smoothed_abs(z, sigma=DEFAULT_SIGMA):
    """Huber-style smoothing of ``|z|``; returns ``(value, q)``."""
    _check_sigma(sigma)
    q = min(max(z / sigma, -1.0), 1.0)
    if z < -sigma:
        value = -z - 0.5 * sigma
    elif z > sigma:
        value = z - 0.5 * sigma
    else:
        value = z * z / (2.0 * sigma)
    return value, q


def smoothed_abs_batch(z, sigma=DEFAULT_SIGMA):
    _check_sigma(sigma)
    z = np.asarray(z, dtype=np.float64)
    q = np.clip(z / sigma, -1.0, 1.0)
    az = np.abs(z)
    value = np.where(az > sigma, az - 0.5 * sigma, z * z / (2.0 * sigma))
    return value, q


def l1_grad(U, X_U, F_S, sigma=DEFAULT_SIGMA):
    """Gradient of ``sum_{c,n} h^sigma(u_c^T x_n - F_S[c, n])`` w.r.t. U.

    ``X_U`` holds unlabeled target samples as columns (``d x N``) and
    ``F_S`` is ``r x N``.  Returns ``X_U Q^T``.
    """
    U = np.asarray(U, dtype=np.float64)
    X_U = np.asarray(X_U, dtype=np.float64)
    F = np.asarray(getattr(F_S, "values", F_S), dtype=np.float64)
    if U.shape[0] != X_U.shape[0] or F.shape != (U.shape[1], X_U.shape[1]):
        raise DimensionError(
            f"shape mismatch: U {U.shape}, X_U {X_U.shape}, F_S {F.shape}")
    _, Q = smoothed_abs_batch(U.T @ X_U - F, sigma)
    return X_U @ Q.T
