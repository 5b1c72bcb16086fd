"""Source-domain knowledge: learn a source metric, split it into fundamental
elements, and evaluate the resulting fragments on the unlabeled source
samples."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (DimensionError, EmptyInputError, FormatError,
                     NotPSDError, NotSymmetricError, ParseError, ConfigError)
from .graph import default_bandwidth
from .linear import HyperParams, LinearMap, pgm_train

METRIC = "metric-derived"
MAPPING = "mapping-derived"

SYMMETRY_TOL = 1e-10
NEG_EIG_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class FundamentalElements:
    elements: np.ndarray  # (r, d_S), one element per row
    kind: str = METRIC

    def __post_init__(self):
        E = np.array(self.elements, dtype=np.float64)
        if E.ndim != 2 or E.shape[0] < 1:
            raise DimensionError("need at least one fundamental element")
        if not np.all(np.isfinite(E)):
            raise ParseError("fundamental elements contain non-finite values")
        E.flags.writeable = False
        object.__setattr__(self, "elements", E)

    @property
    def r(self) -> int:
        return self.elements.shape[0]


@dataclass(frozen=True, eq=False)
class FragmentMatrix:
    """``values[c, n]`` is fragment c evaluated at unlabeled source sample n."""

    values: np.ndarray

    def __post_init__(self):
        F = np.array(self.values, dtype=np.float64)
        if F.ndim != 2:
            raise DimensionError(f"fragment matrix must be 2-D, got {F.shape}")
        if not np.all(np.isfinite(F)):
            raise ParseError("fragment matrix contains non-finite values")
        F.flags.writeable = False
        object.__setattr__(self, "values", F)

    @property
    def r(self) -> int:
        return self.values.shape[0]

    @property
    def n_unlabeled(self) -> int:
        return self.values.shape[1]

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"{self.r} {self.n_unlabeled}\n")
            for row in self.values:
                fh.write(" ".join(repr(float(v)) for v in row) + "\n")

    @classmethod
    def load(cls, path) -> "FragmentMatrix":
        with open(path, encoding="utf-8") as fh:
            lines = [ln for ln in fh.read().splitlines() if ln.strip()]
        if not lines:
            raise EmptyInputError(f"{path}: empty fragment file")
        try:
            r, n = (int(v) for v in lines[0].split())
        except ValueError:
            raise FormatError("header must be 'r n_unlabeled'", line=1) from None
        if len(lines) - 1 != r:
            raise FormatError(f"expected {r} fragment rows, found {len(lines) - 1}")
        rows = []
        for lineno, ln in enumerate(lines[1:], start=2):
            try:
                vals = [float(v) for v in ln.split()]
            except ValueError:
                raise ParseError("non-numeric value", line=lineno) from None
            if len(vals) != n:
                raise FormatError(f"expected {n} values, found {len(vals)}", line=lineno)
            rows.append(vals)
        return cls(np.array(rows, dtype=np.float64).reshape(r, n))


def train_source_metric(source_pairs, r, hyper=None) -> LinearMap:
    """Learn a nonnegative ``d_S x r`` source map from labeled pairs only.

    The target solver is reused with both regularisers switched off.
    """
    if len(source_pairs) == 0:
        raise EmptyInputError("source metric needs at least one labeled pair")
    if r > source_pairs.dim:
        raise DimensionError(f"r={r} exceeds the source dimension {source_pairs.dim}")
    hyper = (hyper or HyperParams()).replace(gamma=0.0, gamma_i=0.0, r=r)
    U, _ = pgm_train(source_pairs, None, None, None, hyper)
    return U


def decompose_metric(A, r) -> FundamentalElements:
    """Factor a PSD matrix as ``P P^T`` and keep the top-r columns of P.

    Elements are eigenvectors scaled by the square root of their eigenvalue,
    ordered by descending eigenvalue.  Each eigenvector's sign is fixed so
    that its first non-negligible component is positive.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"metric must be square, got {A.shape}")
    d = A.shape[0]
    if not 1 <= r <= d:
        raise DimensionError(f"r must be in [1, {d}], got {r}")
    if np.max(np.abs(A - A.T)) > SYMMETRY_TOL:
        raise NotSymmetricError("metric matrix is not symmetric")
    evals, evecs = np.linalg.eigh((A + A.T) / 2.0)
    if evals.min() < -NEG_EIG_TOL:
        raise NotPSDError(f"metric has eigenvalue {evals.min():.3g} < 0")
    order = np.argsort(-evals, kind="stable")[:r]
    evals = np.clip(evals[order], 0.0, None)
    evecs = evecs[:, order]
    for c in range(r):
        v = evecs[:, c]
        lead = np.flatnonzero(np.abs(v) > 1e-12)
        if lead.size and v[lead[0]] < 0:
            evecs[:, c] = -v
    return FundamentalElements((evecs * np.sqrt(evals)).T, kind=METRIC)


def rbf_kernel(x, p, bandwidth) -> float:
    """``exp(-|x - p|^2 / (2 bandwidth^2))``."""
    x = np.asarray(x, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    if not bandwidth > 0:
        raise ConfigError(f"bandwidth must be positive, got {bandwidth}")
    if x.shape != p.shape:
        raise DimensionError(f"dimension mismatch: {x.shape} vs {p.shape}")
    diff = x - p
    return float(np.exp(-np.dot(diff, diff) / (2.0 * bandwidth * bandwidth)))


def build_fragment_matrix(source, corr, bandwidth=None) -> FragmentMatrix:
    """Evaluate source fragments on the unlabeled source samples.

    ``source`` is either :class:`FundamentalElements` (RBF fragments centred
    on each element) or an ``r x N`` table of precomputed source-mapping
    outputs, which is passed through unchanged.
    """
    X = corr.source
    if not isinstance(source, FundamentalElements):
        T = np.asarray(getattr(source, "values", source), dtype=np.float64)
        if T.ndim != 2 or T.shape[1] != corr.count:
            raise DimensionError(
                f"mapping table must be r x {corr.count}, got {T.shape}")
        if not np.all(np.isfinite(T)):
            raise ParseError("mapping table contains non-finite values")
        return FragmentMatrix(T)
    P = source.elements
    if P.shape[1] != X.shape[1]:
        raise DimensionError(
            f"elements have dimension {P.shape[1]}, source samples {X.shape[1]}")
    if bandwidth is None:
        bandwidth = default_bandwidth(X)
    if not bandwidth > 0:
        raise ConfigError(f"bandwidth must be positive, got {bandwidth}")
    sq = ((P[:, None, :] - X[None, :, :]) ** 2).sum(axis=2)
    return FragmentMatrix(np.exp(-sq / (2.0 * bandwidth * bandwidth)))


def mapping_table(source_map, corr) -> np.ndarray:
    """Coordinates of a learned source mapping on the unlabeled samples, as
    an ``r x N`` table for :func:`build_fragment_matrix`."""
    return np.asarray(source_map.apply(corr.source), dtype=np.float64).T
