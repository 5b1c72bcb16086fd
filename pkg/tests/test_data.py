import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from htdml.data import (CorrespondenceSet, LabeledPairSet, LabeledPointSet,
                        load_correspondences, load_pair_dataset, load_point_set,
                        load_samples, save_correspondences, save_pair_dataset,
                        save_point_set)
from htdml.errors import (AlignmentError, EmptyInputError, FormatError, LabelError,
                          PairIndexError, ParseError)


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_two_samples_of_dim_two(tmp_path):
    X = load_samples(write(tmp_path, "s.csv", "1.0,2.0\n3.0,4.0"))
    assert X.shape == (2, 2)
    np.testing.assert_array_equal(X, [[1.0, 2.0], [3.0, 4.0]])


def test_ragged_row_reports_line(tmp_path):
    with pytest.raises(FormatError) as exc:
        load_samples(write(tmp_path, "s.csv", "1.0,2.0\n3.0"))
    assert exc.value.line == 2


def test_comment_header_skipped(tmp_path):
    X = load_samples(write(tmp_path, "s.csv", "# d=2\n1.0,2.0\n3.0,4.0\n"))
    assert X.shape == (2, 2)


def test_non_numeric_cell(tmp_path):
    with pytest.raises(ParseError):
        load_samples(write(tmp_path, "s.csv", "1.0,abc\n"))


def test_empty_sample_file(tmp_path):
    with pytest.raises(EmptyInputError):
        load_samples(write(tmp_path, "s.csv", "# only a comment\n"))


def test_similar_pair_delta(tmp_path):
    s = write(tmp_path, "s.csv", "1.0,2.0\n3.0,5.0\n")
    p = write(tmp_path, "p.csv", "0,1,1\n")
    pairs = load_pair_dataset(s, p)
    assert len(pairs) == 1 and pairs.y[0] == 1
    np.testing.assert_array_equal(pairs.deltas[0], [-2.0, -3.0])
    assert pairs.delta_inf[0] == 3.0


def test_pair_index_out_of_range(tmp_path):
    s = write(tmp_path, "s.csv", "1,2\n3,4\n5,6\n")
    p = write(tmp_path, "p.csv", "0,5,1\n")
    with pytest.raises(PairIndexError):
        load_pair_dataset(s, p)


def test_pair_label_zero(tmp_path):
    s = write(tmp_path, "s.csv", "1,2\n3,4\n")
    p = write(tmp_path, "p.csv", "0,1,0\n")
    with pytest.raises(LabelError):
        load_pair_dataset(s, p)


def test_identical_endpoints_allowed():
    pairs = LabeledPairSet(np.ones((2, 3)), [[0, 1]], [1])
    assert pairs.delta_inf[0] == 0.0


def test_duplicate_pairs_kept():
    pairs = LabeledPairSet(np.eye(3), [[0, 1], [0, 1]], [1, 1])
    assert len(pairs) == 2


def test_correspondence_count():
    rng = np.random.default_rng(0)
    corr = CorrespondenceSet(rng.normal(size=(5, 8)), rng.normal(size=(5, 3)))
    assert corr.count == 5


def test_correspondence_misaligned():
    with pytest.raises(AlignmentError):
        CorrespondenceSet(np.zeros((5, 8)), np.zeros((4, 3)))


def test_correspondence_empty():
    with pytest.raises(EmptyInputError):
        CorrespondenceSet(np.zeros((0, 8)), np.zeros((0, 3)))


def test_correspondence_files_misaligned(tmp_path):
    a = write(tmp_path, "a.csv", "1,2\n3,4\n")
    b = write(tmp_path, "b.csv", "1\n")
    with pytest.raises(AlignmentError):
        load_correspondences(a, b)


def test_point_set_labels_must_be_contiguous():
    with pytest.raises(LabelError):
        LabeledPointSet(np.zeros((3, 2)), [0, 2, 2])


def test_containers_are_read_only():
    pairs = LabeledPairSet(np.eye(3), [[0, 1]], [1])
    with pytest.raises(ValueError):
        pairs.samples[0, 0] = 5.0


finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(2, 6), st.integers(1, 4)), elements=finite),
       st.integers(0, 2**31 - 1))
def test_pair_round_trip_bitwise(tmp_path_factory, X, seed):
    rng = np.random.default_rng(seed)
    n = X.shape[0]
    idx = np.array([rng.choice(n, size=2, replace=False) for _ in range(4)])
    pairs = LabeledPairSet(X, idx, rng.choice([-1, 1], size=4))
    d = tmp_path_factory.mktemp("rt")
    save_pair_dataset(pairs, d / "s.csv", d / "p.csv")
    back = load_pair_dataset(d / "s.csv", d / "p.csv")
    assert back.samples.tobytes() == pairs.samples.tobytes()
    np.testing.assert_array_equal(back.index, pairs.index)
    np.testing.assert_array_equal(back.y, pairs.y)
    # cached infinity norms agree with a recomputation
    np.testing.assert_array_equal(
        back.delta_inf, np.abs(back.x1 - back.x2).max(axis=1))


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 5), st.integers(1, 4)), elements=finite),
       arrays(np.float64, st.tuples(st.just(1), st.integers(1, 3)), elements=finite))
def test_correspondence_round_trip_bitwise(tmp_path_factory, S, T):
    T = np.repeat(T, S.shape[0], axis=0) * np.arange(1, S.shape[0] + 1)[:, None]
    corr = CorrespondenceSet(S, T)
    d = tmp_path_factory.mktemp("rt")
    save_correspondences(corr, d / "a.csv", d / "b.csv")
    back = load_correspondences(d / "a.csv", d / "b.csv")
    assert back.source.tobytes() == corr.source.tobytes()
    assert back.target.tobytes() == corr.target.tobytes()


def test_point_set_round_trip(tmp_path):
    pts = LabeledPointSet(np.random.default_rng(1).normal(size=(6, 3)), [0, 1, 2, 0, 1, 2])
    save_point_set(pts, tmp_path / "x.csv", tmp_path / "y.csv")
    back = load_point_set(tmp_path / "x.csv", tmp_path / "y.csv")
    assert back.X.tobytes() == pts.X.tobytes()
    np.testing.assert_array_equal(back.labels, pts.labels)
