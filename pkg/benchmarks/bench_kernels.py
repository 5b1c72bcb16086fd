"""Time the compiled and numpy tree kernels on the same inputs.

Usage::

    python3 benchmarks/bench_kernels.py [--n 2000] [--d 10] [--r 5] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from htdml import kernels
from htdml.trees import fit_tree


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--d", type=int, default=10)
    ap.add_argument("--r", type=int, default=5)
    ap.add_argument("--depth", type=int, default=4)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    X = rng.normal(size=(args.n, args.d))
    Y = rng.normal(size=(args.n, args.r))
    idx = np.arange(args.n, dtype=np.int64)
    tree = fit_tree(X, Y, args.depth)

    if "compiled" not in kernels.BACKENDS:
        print("compiled extension not built; only the numpy backend is available")
    print(f"n={args.n} d={args.d} r={args.r} depth={args.depth}")
    print(f"{'backend':<10}{'best_split [ms]':>18}{'route [ms]':>14}")
    timings = {}
    for name in kernels.BACKENDS:
        split = min(timeit.repeat(
            lambda: kernels.best_split(X, Y, idx, 1, backend=name),
            number=1, repeat=args.repeat))
        route = min(timeit.repeat(
            lambda: kernels.route(X, tree.feature, tree.threshold, tree.left,
                                  tree.right, backend=name),
            number=1, repeat=args.repeat))
        timings[name] = (split, route)
        print(f"{name:<10}{split * 1e3:>18.3f}{route * 1e3:>14.3f}")
    if len(timings) == 2:
        (ps, pr), (cs, cr) = timings["python"], timings["compiled"]
        print(f"speed-up   {ps / cs:>17.1f}x{pr / cr:>13.1f}x")


if __name__ == "__main__":
    main()
