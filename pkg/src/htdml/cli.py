"""Command-line front end.

Every command reads its settings from built-in defaults, then an optional
``key=value`` config file, then explicit flags (later sources win).  Exit
codes: 0 success, 1 usage or configuration error, 2 data or format error,
3 numerical failure.
"""
from __future__ import annotations

import argparse
import contextlib
import dataclasses
import logging
import sys
from pathlib import Path

from threadpoolctl import threadpool_limits

from . import data as io
from .bench import run_benchmark
from .boosting import BoostParams, boost_train
from .errors import ConfigError, DataError, NumericalError
from .evaluation import IdentityMap, evaluate
from .fragments import (MAPPING, METRIC, FragmentMatrix, build_fragment_matrix,
                        decompose_metric, mapping_table, train_source_metric)
from .graph import build_neighbor_graph, default_bandwidth
from .linear import HyperParams, LinearMap, pgm_train
from .persistence import load_model, save_model
from .synth import SynthConfig, generate_synthetic

log = logging.getLogger("htdml")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

# dataset directory layout written by ``synth`` and read by the other commands
LAYOUT = {
    "source_samples": "source_samples.csv",
    "source_pairs": "source_pairs.csv",
    "target_samples": "target_samples.csv",
    "target_pairs": "target_pairs.csv",
    "unlabeled_source": "unlabeled_source.csv",
    "unlabeled_target": "unlabeled_target.csv",
    "train_samples": "train_samples.csv",
    "train_labels": "train_labels.csv",
    "test_samples": "test_samples.csv",
    "test_labels": "test_labels.csv",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fields(cls):
    return {f.name: f for f in dataclasses.fields(cls)}


HYPER_FIELDS = _fields(HyperParams)
BOOST_FIELDS = _fields(BoostParams)
SYNTH_FIELDS = {k: v for k, v in _fields(SynthConfig).items() if k != "seed"}

EXTRA = {
    # name: (type, default, help)
    "k": (int, 1, "neighbours used by the kNN evaluation"),
    "kind": (str, MAPPING, f"fragment construction: '{MAPPING}' or '{METRIC}'"),
    "bandwidth": (float, None, "RBF bandwidth for metric-derived fragments "
                               "(default: mean squared pairwise distance)"),
    "n_seeds": (int, 10, "number of consecutive seeds, starting at --seed"),
    "jobs": (int, 1, "worker processes for the benchmark"),
}

DESCRIPTIONS = {
    "gamma": "weight of the fragment-matching term",
    "gamma_i": "weight of the neighbour-graph smoothness term",
    "sigma": "smoothing width of the hinge and absolute-value losses",
    "rho": "sufficient-decrease constant of the line search",
    "eps_stop": "relative objective change that stops the solver",
    "max_iter": "maximum solver iterations",
    "r": "dimension of the learned mapping (number of fragments)",
    "seed": "random seed",
    "beta": "step shrink factor of the line search",
    "k_neighbors": "neighbours per sample in the unlabeled graph",
    "n_trees": "boosting rounds",
    "alpha": "learning rate applied to every tree",
    "depth": "maximum tree depth",
}

# settings each command accepts, from flags or the config file
COMMAND_KEYS = {
    "synth": ["seed", *SYNTH_FIELDS],
    "fragments": ["r", "seed", "sigma", "rho", "eps_stop", "max_iter", "beta",
                  "kind", "bandwidth"],
    "train-linear": list(HYPER_FIELDS),
    "train-gbrt": [*HYPER_FIELDS, *BOOST_FIELDS],
    "eval": ["k"],
    "bench": [*HYPER_FIELDS, *BOOST_FIELDS, *SYNTH_FIELDS, "k", "kind",
              "n_seeds", "jobs"],
}


def _setting_info(name):
    """(type, default, help) for a setting name."""
    if name in EXTRA:
        return EXTRA[name]
    for group, label in ((HYPER_FIELDS, "hyper-parameter"), (BOOST_FIELDS, "boosting"),
                         (SYNTH_FIELDS, "synthetic data")):
        if name in group:
            f = group[name]
            typ = {"int": int, "float": float, "str": str}.get(
                f.type if isinstance(f.type, str) else f.type.__name__, str)
            return typ, f.default, DESCRIPTIONS.get(name, f"{label} setting {name}")
    if name == "seed":
        return int, 0, "random seed"
    raise KeyError(name)


def _add_settings(p, keys):
    for name in keys:
        typ, default, text = _setting_info(name)
        shown = "none" if default is None else default
        p.add_argument(f"--{name.replace('_', '-')}", dest=name, type=typ, default=None,
                       metavar=typ.__name__.upper(),
                       help=f"{text}; config key {name} (default: {shown})")


def read_config(path, allowed):
    """Parse a ``key=value`` file, rejecting keys outside ``allowed``."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        if key not in allowed:
            raise UsageError(f"{path}:{lineno}: unknown key '{key}'")
        typ = _setting_info(key)[0]
        try:
            out[key] = typ(value.strip())
        except ValueError:
            raise UsageError(f"{path}:{lineno}: bad value for '{key}'") from None
    return out


def resolve(args, command):
    """Defaults, then config file, then flags."""
    keys = COMMAND_KEYS[command]
    settings = {k: _setting_info(k)[1] for k in keys}
    if args.config:
        settings.update(read_config(args.config, keys))
    for k in keys:
        v = getattr(args, k, None)
        if v is not None:
            settings[k] = v
    return settings


def _pick(settings, fields):
    return {k: settings[k] for k in fields if k in settings}


def _hyper(settings):
    return HyperParams(**_pick(settings, HYPER_FIELDS))


def _paths(data_dir):
    root = Path(data_dir)
    if not root.is_dir():
        raise DataError(f"data directory {root} does not exist")
    return {k: root / v for k, v in LAYOUT.items()}


def _require(args, *names):
    for n in names:
        if getattr(args, n, None) is None:
            raise UsageError(f"--{n.replace('_', '-')} is required")


def _out_dir(path):
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _kv_text(d):
    return "".join(f"{k}={d[k]!r}\n" if isinstance(d[k], float) else f"{k}={d[k]}\n"
                   for k in sorted(d))


def _trace_summary(trace):
    return {"iterations": trace.n_iter, "status": trace.status,
            "initial_objective": float(trace.initial_objective),
            "final_objective": float(trace.final_objective)}


def _target_inputs(paths, hyper):
    pairs = io.load_pair_dataset(paths["target_samples"], paths["target_pairs"])
    corr = io.load_correspondences(paths["unlabeled_source"], paths["unlabeled_target"])
    graph = None
    if hyper.gamma_i > 0:
        graph = build_neighbor_graph(corr.target, hyper.k_neighbors,
                                     default_bandwidth(corr.target))
    return pairs, corr, graph


def _fragments_for(args, hyper):
    if hyper.gamma > 0 and args.fragments is None:
        raise UsageError("--fragments is required when gamma > 0")
    return FragmentMatrix.load(args.fragments) if args.fragments else None


def cmd_synth(args):
    s = resolve(args, "synth")
    _require(args, "out")
    cfg = SynthConfig(**_pick(s, _fields(SynthConfig)))
    d = generate_synthetic(cfg)
    out = _out_dir(args.out)
    p = {k: out / v for k, v in LAYOUT.items()}
    io.save_pair_dataset(d.source_pairs, p["source_samples"], p["source_pairs"])
    io.save_pair_dataset(d.target_pairs, p["target_samples"], p["target_pairs"])
    io.save_correspondences(d.correspondences, p["unlabeled_source"], p["unlabeled_target"])
    io.save_point_set(d.train, p["train_samples"], p["train_labels"])
    io.save_point_set(d.test, p["test_samples"], p["test_labels"])
    (out / "synth_config.txt").write_text(_kv_text(cfg.as_dict()), encoding="utf-8")
    return EXIT_OK


def cmd_fragments(args):
    s = resolve(args, "fragments")
    _require(args, "data", "out")
    from_file = read_config(args.config, COMMAND_KEYS["fragments"]) if args.config else {}
    if args.r is None and "r" not in from_file:
        raise UsageError("--r (number of fragments) must be given explicitly")
    if s["kind"] not in (MAPPING, METRIC):
        raise UsageError(f"--kind must be '{MAPPING}' or '{METRIC}'")
    paths = _paths(args.data)
    hyper = HyperParams(**_pick(s, HYPER_FIELDS))
    src = io.load_pair_dataset(paths["source_samples"], paths["source_pairs"])
    corr = io.load_correspondences(paths["unlabeled_source"], paths["unlabeled_target"])
    source_map = train_source_metric(src, hyper.r, hyper)
    if s["kind"] == METRIC:
        F = build_fragment_matrix(decompose_metric(source_map.metric(), hyper.r), corr,
                                  s["bandwidth"])
    else:
        F = build_fragment_matrix(mapping_table(source_map, corr), corr)
    F.save(args.out)
    return EXIT_OK


def cmd_train_linear(args):
    s = resolve(args, "train-linear")
    _require(args, "data", "out")
    hyper = _hyper(s)
    F = _fragments_for(args, hyper)
    pairs, corr, graph = _target_inputs(_paths(args.data), hyper)
    model, trace = pgm_train(pairs, corr.target.T, F, graph, hyper)
    save_model(model, args.out, hyper.as_dict(), _trace_summary(trace))
    trace.to_csv(args.trace or f"{args.out}.trace.csv")
    return EXIT_OK


def cmd_train_gbrt(args):
    s = resolve(args, "train-gbrt")
    _require(args, "data", "out", "init")
    hyper = _hyper(s)
    boost = BoostParams(**_pick(s, BOOST_FIELDS))
    F = _fragments_for(args, hyper)
    init = load_model(args.init).model
    if not isinstance(init, LinearMap):
        raise UsageError("--init must be a linear model file")
    pairs, corr, graph = _target_inputs(_paths(args.data), hyper)
    model, trace = boost_train(init, pairs, corr, F, graph, hyper,
                               boost.n_trees, boost.alpha, boost.depth)
    meta = {**hyper.as_dict(), **dataclasses.asdict(boost)}
    save_model(model, args.out, meta, _trace_summary(trace))
    trace.to_csv(args.trace or f"{args.out}.trace.csv")
    return EXIT_OK


def cmd_eval(args):
    s = resolve(args, "eval")
    _require(args, "data")
    if (args.model is None) == (not args.euclidean):
        raise UsageError("give exactly one of --model or --euclidean")
    paths = _paths(args.data)
    train = io.load_point_set(paths["train_samples"], paths["train_labels"])
    test = io.load_point_set(paths["test_samples"], paths["test_labels"])
    model = IdentityMap(train.X.shape[1]) if args.euclidean else load_model(args.model).model
    config = {"k": s["k"], "model": "euclidean" if args.euclidean else Path(args.model).name}
    report = evaluate(model, train, test, s["k"], with_map=args.map, config=config)
    text = report.to_text()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_bench(args, deterministic=False):
    s = resolve(args, "bench")
    _require(args, "out")
    if s["kind"] not in (MAPPING, METRIC):
        raise UsageError(f"--kind must be '{MAPPING}' or '{METRIC}'")
    seed = args.seed if args.seed is not None else 0
    hyper = _hyper(s)
    cfg = SynthConfig(**_pick(s, SYNTH_FIELDS))
    boost = BoostParams(**_pick(s, BOOST_FIELDS))
    jobs = 1 if deterministic else s["jobs"]
    report = run_benchmark(cfg, hyper, range(seed, seed + s["n_seeds"]), boost, s["k"],
                           s["kind"], jobs)
    out = _out_dir(args.out)
    (out / "bench.csv").write_text(report.to_csv(), encoding="utf-8")
    (out / "bench.md").write_text(report.to_markdown(), encoding="utf-8")
    (out / "bench_per_seed.csv").write_text(report.per_seed_csv(), encoding="utf-8")
    return EXIT_OK


COMMANDS = {
    "synth": (cmd_synth, "generate a seeded synthetic dataset directory"),
    "fragments": (cmd_fragments, "learn a source metric and write its fragment matrix"),
    "train-linear": (cmd_train_linear, "train the linear target mapping"),
    "train-gbrt": (cmd_train_gbrt, "refine a linear mapping with boosted trees"),
    "eval": (cmd_eval, "kNN evaluation of a model on the test split"),
    "bench": (cmd_bench, "run the ablation benchmark over several seeds"),
}


def build_parser():
    parser = _Parser(prog="htdml", description="Heterogeneous transfer metric learning.",
                     formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, text) in COMMANDS.items():
        p = sub.add_parser(name, help=text, description=text)
        p.add_argument("--config", help="key=value settings file (flags override it)")
        p.add_argument("--threads", type=int, default=None,
                       help="cap on BLAS/OpenMP threads (default: library default)")
        p.add_argument("--deterministic", action="store_true",
                       help="single-threaded, sequential execution (default: off)")
        keys = COMMAND_KEYS[name]
        if "seed" not in keys:
            p.add_argument("--seed", type=int, default=None, help="random seed (default: 0)")
        _add_settings(p, keys)
        if name == "synth":
            p.add_argument("--out", help="output directory")
        elif name == "bench":
            p.add_argument("--out", help="output directory for the reports")
        else:
            p.add_argument("--data", help="dataset directory in the synth layout")
            p.add_argument("--out", help="output file")
        if name in ("train-linear", "train-gbrt"):
            p.add_argument("--fragments", help="fragment matrix file "
                                               "(required when gamma > 0)")
            p.add_argument("--trace", help="trace CSV path (default: <out>.trace.csv)")
        if name == "train-gbrt":
            p.add_argument("--init", help="linear model file to refine")
        if name == "eval":
            p.add_argument("--model", help="model file")
            p.add_argument("--euclidean", action="store_true",
                           help="evaluate the plain Euclidean distance (default: off)")
            p.add_argument("--map", action="store_true",
                           help="also report mean average precision (default: off)")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    func = COMMANDS[args.command][0]
    limit = 1 if args.deterministic else args.threads
    if limit is not None and limit < 1:
        return _fail(parser, "--threads must be >= 1", EXIT_USAGE)
    ctx = threadpool_limits(limits=limit) if limit else contextlib.nullcontext()
    try:
        with ctx:
            if args.command == "bench":
                return func(args, deterministic=args.deterministic)
            return func(args)
    except (UsageError, ConfigError) as exc:
        return _fail(parser, str(exc), EXIT_USAGE)
    except DataError as exc:
        return _fail(parser, str(exc), EXIT_DATA)
    except FileNotFoundError as exc:
        return _fail(parser, f"missing input file: {exc.filename}", EXIT_DATA)
    except OSError as exc:
        return _fail(parser, str(exc), EXIT_DATA)
    except NumericalError as exc:
        return _fail(parser, f"numerical failure: {exc}", EXIT_NUMERIC)


def _fail(parser, message, code):
    sys.stderr.write(f"{parser.prog}: error: {message}\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
