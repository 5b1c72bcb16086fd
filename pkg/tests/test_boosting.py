import numpy as np
import pytest

from htdml.boosting import (BoostParams, BoostedMap, _PointProblem, boost_train,
                            boosted_objective, negative_gradients)
from htdml.data import CorrespondenceSet, LabeledPairSet
from htdml.errors import ConfigError, DimensionError
from htdml.linear import HyperParams, LinearMap, gradient_smoothed, objective_smoothed
from htdml.trees import RegressionTree, fit_tree

from helpers import away_from_kinks, random_instance, rel_err


def linear_map(seed, d=5, r=3):
    return LinearMap(np.random.default_rng(seed).random((d, r)))


def test_boost_params_validation():
    assert BoostParams() == BoostParams(100, 0.01, 4)
    with pytest.raises(ConfigError):
        BoostParams(n_trees=0)
    with pytest.raises(ConfigError):
        BoostParams(alpha=-0.1)


def test_zero_trees_is_linear():
    m = linear_map(0)
    X = np.random.default_rng(1).normal(size=(7, 5))
    np.testing.assert_array_equal(BoostedMap(m, ()).apply(X), m.apply(X))


def test_zero_rate_ignores_trees():
    m = linear_map(0)
    rng = np.random.default_rng(2)
    X = rng.normal(size=(20, 5))
    t = fit_tree(X, rng.normal(size=(20, 3)), 3)
    np.testing.assert_array_equal(BoostedMap(m, (t,), 0.0).apply(X), m.apply(X))


def test_single_leaf_tree_shifts_output():
    m = linear_map(0)
    v = np.array([1.0, -2.0, 0.5])
    x = np.random.default_rng(3).normal(size=5)
    out = BoostedMap(m, (RegressionTree.leaf(v),), 0.1).apply(x)
    np.testing.assert_allclose(out, x @ m.U + 0.1 * v, rtol=1e-15)


def test_tree_output_dimension_checked():
    with pytest.raises(DimensionError):
        BoostedMap(linear_map(0), (RegressionTree.leaf([1.0, 2.0]),))


def test_satisfied_pair_has_no_hinge_residual():
    X = np.array([[0.0, 0.0], [0.1, 0.0], [5.0, 5.0], [6.0, 5.0]])
    pairs = LabeledPairSet(X, [[0, 1], [2, 3]], [1, 1])
    corr = CorrespondenceSet(np.zeros((2, 1)), np.array([[5.0, 5.0], [6.0, 5.0]]))
    hyper = HyperParams(gamma=0.0, gamma_i=0.0, r=2)
    m = LinearMap(np.eye(2) * 0.1)
    table = negative_gradients(m, pairs, corr, None, None, hyper)
    np.testing.assert_array_equal(table.residuals, 0.0)


def test_fitted_fragments_have_no_fragment_residual():
    rng = np.random.default_rng(4)
    XU = rng.normal(size=(6, 3))
    corr = CorrespondenceSet(rng.normal(size=(6, 2)), XU)
    m = LinearMap(rng.random((3, 2)))
    F = (XU @ m.U).T
    pairs = LabeledPairSet(XU * 0.001, [[0, 1]], [1])
    hyper = HyperParams(gamma=1.0, gamma_i=0.0, r=2)
    table = negative_gradients(m, pairs, corr, F, None, hyper)
    np.testing.assert_array_equal(table.residuals, 0.0)


def test_residuals_match_finite_differences():
    checked = 0
    for seed in range(200):
        pairs, XU, F, graph, hyper, U, corr = random_instance(seed)
        prob = _PointProblem(pairs, corr, F, graph, hyper)
        phi = prob.points @ U + 0.05 * np.random.default_rng(seed).normal(
            size=(len(prob.points), hyper.r))
        if not away_from_kinks(pairs, U, F, XU, hyper.sigma,
                               phi_pairs=phi[prob.a] - phi[prob.b], phi_u=phi[prob.u]):
            continue
        G = prob.gradient(phi)
        h = 1e-5
        fd = np.zeros_like(phi)
        for idx in np.ndindex(phi.shape):
            p = phi.copy()
            p[idx] += h
            fp = prob.objective(p)
            p[idx] -= 2 * h
            fd[idx] = (fp - prob.objective(p)) / (2 * h)
        assert rel_err(G, fd) < 1e-4
        checked += 1
        if checked == 3:
            break
    assert checked == 3


def test_point_table_is_deduplicated():
    pairs, XU, F, graph, hyper, U, corr = random_instance(0)
    prob = _PointProblem(pairs, corr, F, graph, hyper)
    assert len(np.unique(prob.points, axis=0)) == len(prob.points)
    np.testing.assert_array_equal(prob.points[prob.a], pairs.x1)
    np.testing.assert_array_equal(prob.points[prob.u], corr.target)


@pytest.mark.parametrize("seed", range(5))
def test_chain_rule_consistency(seed):
    pairs, XU, F, graph, hyper, U, corr = random_instance(seed)
    table = negative_gradients(LinearMap(U), pairs, corr, F, graph, hyper)
    assembled = -table.points.T @ table.residuals
    G = gradient_smoothed(U, pairs, XU, F, graph, hyper)
    assert rel_err(assembled, G) < 1e-8


def test_zero_tree_objective_equals_linear_objective():
    pairs, XU, F, graph, hyper, U, corr = random_instance(1)
    lin = objective_smoothed(U, pairs, XU, F, graph, hyper)
    assert boosted_objective(BoostedMap(LinearMap(U), ()), pairs, corr, F, graph, hyper) == lin
    assert boosted_objective(LinearMap(U), pairs, corr, F, graph, hyper) == lin


def test_zero_rate_keeps_objective():
    pairs, XU, F, graph, hyper, U, corr = random_instance(2)
    model, trace = boost_train(LinearMap(U), pairs, corr, F, graph, hyper, 5, 0.0, 2)
    assert trace.n_iter == 5
    assert all(v == trace.initial_objective for v in trace.objective)
    assert boosted_objective(model, pairs, corr, F, graph, hyper) == trace.initial_objective


def test_boosting_decreases_and_trace_matches_model():
    pairs, XU, F, graph, hyper, U, corr = random_instance(3)
    model, trace = boost_train(LinearMap(U), pairs, corr, F, graph, hyper, 10, 0.05, 3)
    assert trace.n_iter == 10 and len(model.trees) == 10
    assert trace.final_objective <= trace.initial_objective + 1e-9
    full = boosted_objective(model, pairs, corr, F, graph, hyper)
    assert full == trace.final_objective


def test_boost_train_checks_rank():
    pairs, XU, F, graph, hyper, U, corr = random_instance(4)
    with pytest.raises(DimensionError):
        boost_train(LinearMap(U[:, :2]), pairs, corr, F, graph, hyper, 2)
