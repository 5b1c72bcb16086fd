import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from htdml import kernels
from htdml.errors import EmptyInputError
from htdml.trees import RegressionTree, fit_tree

needs_compiled = pytest.mark.skipif("compiled" not in kernels.BACKENDS,
                                    reason="compiled extension not built")


def sse(tree, X, Y):
    return float(np.sum((tree.predict(X) - Y) ** 2))


def test_constant_targets_single_leaf():
    X = np.random.default_rng(0).normal(size=(8, 3))
    Y = np.tile([1.5, -2.0], (8, 1))
    t = fit_tree(X, Y, depth=3)
    assert t.n_nodes == 1
    np.testing.assert_array_equal(t.predict(X), Y)


def test_two_points_exact_split():
    X = np.array([[0.0], [1.0]])
    Y = np.array([[3.0, -1.0], [7.0, 2.0]])
    t = fit_tree(X, Y, depth=1)
    assert t.n_nodes == 3 and t.feature[0] == 0
    assert 0.0 < t.threshold[0] < 1.0
    np.testing.assert_array_equal(t.predict(X), Y)


def test_depth_zero_is_mean():
    rng = np.random.default_rng(1)
    X, Y = rng.normal(size=(10, 2)), rng.normal(size=(10, 3))
    t = fit_tree(X, Y, depth=0)
    assert t.n_nodes == 1
    np.testing.assert_allclose(t.value[0], Y.mean(axis=0))


def test_tie_break_prefers_lowest_feature():
    # both features separate the targets identically
    X = np.array([[0.0, 0.0], [1.0, 1.0]])
    t = fit_tree(X, np.array([[0.0], [1.0]]), depth=1)
    assert t.feature[0] == 0


def test_routing_left_iff_less_equal():
    t = RegressionTree([0, -1, -1], [0.5, 0, 0], [1, -1, -1], [2, -1, -1],
                       [[0.0], [-1.0], [1.0]])
    np.testing.assert_array_equal(t.predict(np.array([[0.5], [0.50001], [-3.0]]))[:, 0],
                                  [-1.0, 1.0, -1.0])
    assert t.predict(np.array([0.2])).shape == (1,)


def test_empty_input():
    with pytest.raises(EmptyInputError):
        fit_tree(np.zeros((0, 2)), np.zeros((0, 1)), 2)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 40), st.integers(1, 4),
       st.integers(1, 3), st.integers(0, 4), st.booleans())
def test_fit_never_worse_than_mean(seed, n, d, r, depth, discrete):
    rng = np.random.default_rng(seed)
    X = rng.integers(0, 3, size=(n, d)).astype(float) if discrete else rng.normal(size=(n, d))
    Y = rng.normal(size=(n, r))
    t = fit_tree(X, Y, depth)
    mean_err = float(np.sum((Y - Y.mean(axis=0)) ** 2))
    assert sse(t, X, Y) <= mean_err + 1e-9
    assert t.depth <= depth
    # every sample reaches a leaf
    assert np.all(t.feature[t.leaves(X)] == -1)


@needs_compiled
@settings(max_examples=80, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 60), st.integers(1, 5),
       st.integers(1, 4), st.integers(1, 3), st.booleans())
def test_split_backends_agree(seed, n, d, r, min_leaf, discrete):
    rng = np.random.default_rng(seed)
    X = rng.integers(0, 4, size=(n, d)).astype(float) if discrete else rng.normal(size=(n, d))
    Y = rng.normal(size=(n, r))
    idx = np.sort(rng.choice(n, size=rng.integers(1, n + 1), replace=False)).astype(np.int64)
    a = kernels.best_split(X, Y, idx, min_leaf, backend="python")
    b = kernels.best_split(X, Y, idx, min_leaf, backend="compiled")
    assert a[0] == b[0]
    if a[0] >= 0:
        assert a[1] == b[1] and a[2] == b[2]


@needs_compiled
@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000), st.integers(2, 80), st.integers(0, 5))
def test_fitted_trees_identical_across_backends(seed, n, depth):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 3))
    Y = rng.normal(size=(n, 2))
    trees = {}
    saved = kernels._active
    try:
        for name in ("python", "compiled"):
            kernels._active = kernels.BACKENDS[name]
            trees[name] = fit_tree(X, Y, depth)
    finally:
        kernels._active = saved
    p, c = trees["python"], trees["compiled"]
    for field in ("feature", "threshold", "left", "right", "value"):
        assert getattr(p, field).tobytes() == getattr(c, field).tobytes()
    Q = rng.normal(size=(50, 3))
    for name in ("python", "compiled"):
        leaves = kernels.route(Q, p.feature, p.threshold, p.left, p.right, backend=name)
        np.testing.assert_array_equal(leaves, kernels.route(
            Q, p.feature, p.threshold, p.left, p.right, backend="python"))
