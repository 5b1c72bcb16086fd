import numpy as np
import pytest

from htdml.boosting import BoostedMap
from htdml.errors import FormatError, VersionError
from htdml.linear import LinearMap
from htdml.persistence import dumps_model, load_model, loads_model, save_model
from htdml.trees import fit_tree


def boosted(seed=0, n_trees=3):
    rng = np.random.default_rng(seed)
    lin = LinearMap(rng.random((4, 2)))
    X = rng.normal(size=(40, 4))
    trees = tuple(fit_tree(X, rng.normal(size=(40, 2)), 3) for _ in range(n_trees))
    return BoostedMap(lin, trees, 0.05)


def test_linear_round_trip(tmp_path):
    m = LinearMap(np.random.default_rng(0).random((5, 3)) / 7.0)
    save_model(m, tmp_path / "m.txt", {"gamma": 1.0, "r": 3}, {"status": "converged"})
    back = load_model(tmp_path / "m.txt")
    assert back.model.U.tobytes() == m.U.tobytes()
    assert back.hyper == {"gamma": 1.0, "r": 3}
    assert back.trace == {"status": "converged"}


def test_boosted_round_trip_predictions(tmp_path):
    m = boosted()
    save_model(m, tmp_path / "g.txt")
    back = load_model(tmp_path / "g.txt").model
    assert isinstance(back, BoostedMap) and len(back.trees) == 3
    assert back.alpha == m.alpha
    X = np.random.default_rng(9).normal(size=(100, 4))
    assert back.apply(X).tobytes() == m.apply(X).tobytes()
    for a, b in zip(back.trees, m.trees):
        for f in ("feature", "threshold", "left", "right"):
            assert getattr(a, f).tobytes() == getattr(b, f).tobytes()
        # only leaf outputs are stored
        leaf = a.feature < 0
        assert a.value[leaf].tobytes() == b.value[leaf].tobytes()


def test_header_and_node_lines():
    text = dumps_model(boosted(n_trees=1))
    lines = text.splitlines()
    assert lines[0] == "HTDML-GBRT v1"
    assert any(ln.startswith("N ") for ln in lines)
    assert any(ln.startswith("L ") for ln in lines)
    assert lines[-1] == "end"


def test_version_mismatch():
    text = dumps_model(LinearMap(np.ones((2, 2)))).replace("v1", "v999", 1)
    with pytest.raises(VersionError):
        loads_model(text)


def test_truncated_file():
    lines = dumps_model(boosted()).splitlines()
    for cut in (3, len(lines) // 2, len(lines) - 1):
        with pytest.raises(FormatError):
            loads_model("\n".join(lines[:cut]))


def test_not_a_model_file():
    with pytest.raises(FormatError):
        loads_model("hello\n")
