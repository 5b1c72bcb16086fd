"""Ablation benchmark on synthetic data: Euclidean baseline, the three
regulariser ablations, full linear HTDML and its boosted refinement."""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .boosting import BoostParams, boost_train
from .errors import ConfigError
from .evaluation import IdentityMap, accuracy, knn_predict, macro_f1
from .fragments import (MAPPING, METRIC, FragmentMatrix, build_fragment_matrix,
                        decompose_metric, mapping_table, train_source_metric)
from .graph import NeighborGraph, build_neighbor_graph, default_bandwidth
from .linear import HyperParams, pgm_train
from .synth import SynthConfig, SynthData, generate_synthetic

log = logging.getLogger(__name__)

METHODS = ("EU", "w/o KT&MR", "w/o KT", "w/o MR", "HTDML", "GB-HTDML")


@dataclass
class BenchReport:
    """Per-method accuracy and macro-F1 over seeds (population std)."""

    seeds: list
    scores: dict = field(default_factory=dict)  # method -> {"accuracy": [...], "macro_f1": [...]}

    def mean(self, method, metric="accuracy") -> float:
        return float(np.mean(self.scores[method][metric]))

    def std(self, method, metric="accuracy") -> float:
        return float(np.std(self.scores[method][metric]))

    def to_csv(self) -> str:
        lines = ["method,accuracy_mean,accuracy_std,macro_f1_mean,macro_f1_std,n_seeds"]
        for m in METHODS:
            lines.append(f"{m},{self.mean(m)!r},{self.std(m)!r},"
                         f"{self.mean(m, 'macro_f1')!r},{self.std(m, 'macro_f1')!r},"
                         f"{len(self.seeds)}")
        return "\n".join(lines) + "\n"

    def to_markdown(self) -> str:
        lines = [f"Seeds: {len(self.seeds)} ({', '.join(map(str, self.seeds))})", "",
                 "| method | accuracy | macroF1 |", "|---|---|---|"]
        for m in METHODS:
            lines.append(f"| {m} | {self.mean(m):.4f} ± {self.std(m):.4f} | "
                         f"{self.mean(m, 'macro_f1'):.4f} ± {self.std(m, 'macro_f1'):.4f} |")
        return "\n".join(lines) + "\n"

    def per_seed_csv(self) -> str:
        lines = ["seed,method,accuracy,macro_f1"]
        for m in METHODS:
            for s, a, f in zip(self.seeds, self.scores[m]["accuracy"],
                               self.scores[m]["macro_f1"]):
                lines.append(f"{s},{m},{a!r},{f!r}")
        return "\n".join(lines) + "\n"


class SeedInputs(NamedTuple):
    data: SynthData
    fragments: FragmentMatrix
    graph: NeighborGraph
    hyper: HyperParams


def prepare_seed(cfg, hyper, seed, fragment_kind=MAPPING) -> SeedInputs:
    """Synthetic draw, source fragments and target graph for one seed."""
    data = generate_synthetic(cfg.replace(seed=seed))
    hyper = hyper.replace(seed=seed)
    corr = data.correspondences
    source_map = train_source_metric(data.source_pairs, hyper.r, hyper)
    if fragment_kind == METRIC:
        elements = decompose_metric(source_map.metric(), hyper.r)
        F_S = build_fragment_matrix(elements, corr, default_bandwidth(corr.source))
    else:
        F_S = build_fragment_matrix(mapping_table(source_map, corr), corr)
    graph = build_neighbor_graph(corr.target, hyper.k_neighbors,
                                 default_bandwidth(corr.target))
    return SeedInputs(data, F_S, graph, hyper)


def run_seed(cfg, hyper, seed, boost=None, k=1, fragment_kind=MAPPING):
    """Train every method on one synthetic draw; returns
    ``{method: (accuracy, macro_f1)}``."""
    boost = boost or BoostParams()
    data, F_S, graph, hyper = prepare_seed(cfg, hyper, seed, fragment_kind)
    corr = data.correspondences
    X_U = corr.target.T
    pairs = data.target_pairs

    models = {"EU": IdentityMap(pairs.dim)}
    variants = {"w/o KT&MR": dict(gamma=0.0, gamma_i=0.0),
                "w/o KT": dict(gamma=0.0),
                "w/o MR": dict(gamma_i=0.0),
                "HTDML": {}}
    for name, change in variants.items():
        models[name], _ = pgm_train(pairs, X_U, F_S, graph, hyper.replace(**change))
    models["GB-HTDML"], _ = boost_train(models["HTDML"], pairs, corr, F_S, graph, hyper,
                                        boost.n_trees, boost.alpha, boost.depth)
    out = {}
    for name in METHODS:
        preds = knn_predict(data.train, models[name], data.test.X, k)
        out[name] = (accuracy(preds, data.test.labels), macro_f1(preds, data.test.labels))
    log.info("seed %d: %s", seed, {m: round(v[0], 4) for m, v in out.items()})
    return out


def run_benchmark(cfg=None, hyper=None, seeds=range(10), boost=None, k=1,
                  fragment_kind=MAPPING, n_jobs=1) -> BenchReport:
    seeds = [int(s) for s in seeds]
    if len(seeds) < 3:
        raise ConfigError("the benchmark needs at least three seeds")
    cfg = cfg or SynthConfig()
    hyper = hyper or HyperParams()
    args = [(cfg, hyper, s, boost, k, fragment_kind) for s in seeds]
    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(_run_seed_star, args))
    else:
        results = [run_seed(*a) for a in args]
    report = BenchReport(seeds=seeds)
    for m in METHODS:
        report.scores[m] = {"accuracy": [r[m][0] for r in results],
                            "macro_f1": [r[m][1] for r in results]}
    return report


def _run_seed_star(args):
    return run_seed(*args)
