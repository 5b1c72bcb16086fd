"""Seeded synthetic heterogeneous-domain data.

Latent class draws are observed through two fixed random projections: an
informative, low-noise source view and a noisy, low-dimensional target view.
"""
from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from .data import CorrespondenceSet, LabeledPairSet, LabeledPointSet
from .errors import ConfigError


@dataclass(frozen=True)
class SynthConfig:
    n_classes: int = 5
    latent_dim: int = 5
    d_S: int = 40
    d_M: int = 10
    n_labeled_pairs_source: int = 500
    n_labeled_pairs_target: int = 50
    n_unlabeled: int = 500
    n_test: int = 300
    noise_source: float = 0.1
    noise_target: float = 0.8
    seed: int = 0
    labeled_per_class_source: int = 40
    labeled_per_class_target: int = 10
    latent_noise: float = 0.3
    center_radius: float = 2.0
    target_projection: str = "random"

    def __post_init__(self):
        counts = ["n_classes", "latent_dim", "d_S", "d_M", "n_labeled_pairs_source",
                  "n_labeled_pairs_target", "n_unlabeled", "n_test",
                  "labeled_per_class_source", "labeled_per_class_target"]
        for name in counts:
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ConfigError(f"{name} must be a positive integer, got {v}")
        if self.n_classes < 2:
            raise ConfigError("need at least two classes for dissimilar pairs")
        if self.n_test < self.n_classes:
            raise ConfigError("n_test must cover every class")
        for name in ("labeled_per_class_source", "labeled_per_class_target"):
            if getattr(self, name) < 2:
                raise ConfigError(f"{name} must be >= 2 to form similar pairs")
        for name in ("noise_source", "noise_target", "latent_noise"):
            if not getattr(self, name) >= 0:
                raise ConfigError(f"{name} must be >= 0")
        if not self.center_radius > 0:
            raise ConfigError("center_radius must be positive")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ConfigError("seed must be a non-negative integer")
        if self.target_projection not in ("random", "identity"):
            raise ConfigError("target_projection must be 'random' or 'identity'")
        if self.target_projection == "identity" and self.d_M != self.latent_dim:
            raise ConfigError("identity target projection needs d_M == latent_dim")
        if self.d_S < self.latent_dim or self.d_M < self.latent_dim:
            warnings.warn("view dimension below latent_dim loses class information",
                          stacklevel=3)

    def replace(self, **changes) -> "SynthConfig":
        return SynthConfig(**{**asdict(self), **changes})

    def as_dict(self):
        return asdict(self)


class SynthData(NamedTuple):
    source_pairs: LabeledPairSet
    target_pairs: LabeledPairSet
    correspondences: CorrespondenceSet
    test: LabeledPointSet
    train: LabeledPointSet


def _sample_pairs(rng, labels, n_pairs):
    """Alternate similar (+1) and dissimilar (-1) pairs over a labeled pool."""
    by_class = [np.flatnonzero(labels == c) for c in range(labels.max() + 1)]
    n_classes = len(by_class)
    index = np.empty((n_pairs, 2), dtype=np.int64)
    y = np.empty(n_pairs)
    for i in range(n_pairs):
        if i % 2 == 0:
            members = by_class[rng.integers(n_classes)]
            index[i] = rng.choice(members, size=2, replace=False)
            y[i] = 1.0
        else:
            c1, c2 = rng.choice(n_classes, size=2, replace=False)
            index[i] = (rng.choice(by_class[c1]), rng.choice(by_class[c2]))
            y[i] = -1.0
    return index, y


def generate_synthetic(cfg: SynthConfig) -> SynthData:
    rng = np.random.default_rng(cfg.seed)
    k, ell = cfg.n_classes, cfg.latent_dim
    centers = rng.normal(size=(k, ell))
    centers *= cfg.center_radius / np.linalg.norm(centers, axis=1, keepdims=True)
    A = rng.normal(size=(cfg.d_S, ell)) / np.sqrt(cfg.d_S)
    if cfg.target_projection == "identity":
        B = np.eye(ell)
    else:
        B = rng.normal(size=(cfg.d_M, ell)) / np.sqrt(ell)

    def latent(labels):
        return centers[labels] + cfg.latent_noise * rng.normal(size=(len(labels), ell))

    def source_view(z):
        return z @ A.T + cfg.noise_source * rng.normal(size=(len(z), cfg.d_S))

    def target_view(z):
        return z @ B.T + cfg.noise_target * rng.normal(size=(len(z), cfg.d_M))

    src_labels = np.repeat(np.arange(k), cfg.labeled_per_class_source)
    src_X = source_view(latent(src_labels))
    src_idx, src_y = _sample_pairs(rng, src_labels, cfg.n_labeled_pairs_source)

    tgt_labels = np.repeat(np.arange(k), cfg.labeled_per_class_target)
    tgt_X = target_view(latent(tgt_labels))
    tgt_idx, tgt_y = _sample_pairs(rng, tgt_labels, cfg.n_labeled_pairs_target)

    z_u = latent(rng.integers(k, size=cfg.n_unlabeled))
    corr = CorrespondenceSet(source_view(z_u), target_view(z_u))

    test_labels = rng.permutation(np.arange(cfg.n_test) % k)
    test = LabeledPointSet(target_view(latent(test_labels)), test_labels)

    return SynthData(
        source_pairs=LabeledPairSet(src_X, src_idx, src_y),
        target_pairs=LabeledPairSet(tgt_X, tgt_idx, tgt_y),
        correspondences=corr,
        test=test,
        train=LabeledPointSet(tgt_X, tgt_labels),
    )
