from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp
from scipy.optimize import linprog

from fuzzy_gepsvm import dataio
from fuzzy_gepsvm.errors import EmptyClass, MissingValue, NotBinary, ParseError, TooFewSamples


def write(tmp_path, text, name="d.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


def linearly_separable(A, B):
    """Feasibility of w.a - g >= 1, w.b - g <= -1 as a linear program."""
    n = A.shape[1]
    rows = np.vstack([np.hstack([-A, np.ones((len(A), 1))]),
                      np.hstack([B, -np.ones((len(B), 1))])])
    res = linprog(np.zeros(n + 1), A_ub=rows, b_ub=-np.ones(len(rows)),
                  bounds=[(None, None)] * (n + 1), method="highs")
    return res.status == 0


# -- load_csv -------------------------------------------------------------------------

def test_load_three_lines(tmp_path):
    data = dataio.load_csv(write(tmp_path, "1,2,A\n3,4,B\n5,6,A\n"))
    assert (data.m, data.n) == (3, 2)
    np.testing.assert_array_equal(data.labels, [1, 2, 1])
    np.testing.assert_array_equal(data.features, [[1, 2], [3, 4], [5, 6]])


def test_load_three_labels_not_binary(tmp_path):
    with pytest.raises(NotBinary):
        dataio.load_csv(write(tmp_path, "1,2,A\n3,4,B\n5,6,C\n"))


def test_load_label_map_and_header(tmp_path):
    path = write(tmp_path, "y;a;b\ng;1;2\nb;3;4\n")
    data = dataio.load_csv(path, delimiter=";", header=True, label_column=0,
                           label_map={"g": 1, "b": 2})
    np.testing.assert_array_equal(data.labels, [1, 2])
    assert data.feature_names == ["a", "b"]


def test_load_unlabeled(tmp_path):
    data = dataio.load_csv(write(tmp_path, "1,2\n3,4\n"), label_column=None)
    assert data.labels is None and data.n == 2


def test_load_parse_error_position(tmp_path):
    with pytest.raises(ParseError) as info:
        dataio.load_csv(write(tmp_path, "1,2,A\n3,x,B\n"))
    assert info.value.line == 2 and info.value.column == 2


def test_load_ragged_row(tmp_path):
    with pytest.raises(ParseError):
        dataio.load_csv(write(tmp_path, "1,2,A\n3,B\n"))


def test_missing_value_policy(tmp_path):
    path = write(tmp_path, "1,2,A\n?,4,B\n5,6,B\n")
    with pytest.raises(MissingValue):
        dataio.load_csv(path)
    data = dataio.load_csv(path, missing="drop")
    assert data.m == 2


def test_breast_cancer_shape(breast_cancer):
    assert (breast_cancer.m, breast_cancer.n) == (683, 10)
    assert Counter(breast_cancer.labels.tolist()) == {1: 444, 2: 239}


def test_ionosphere_shape(ionosphere):
    assert (ionosphere.m, ionosphere.n) == (351, 34)


@settings(max_examples=50, deadline=None)
@given(hnp.arrays(np.float64, st.tuples(st.integers(2, 8), st.integers(1, 4)),
                  elements=st.floats(-1e12, 1e12, allow_subnormal=False)))
def test_save_load_round_trip(tmp_path_factory, X):
    labels = np.r_[1, 2, np.ones(len(X) - 2, dtype=int)]
    data = dataio.Dataset(X, labels)
    path = tmp_path_factory.mktemp("rt") / "x.csv"
    dataio.save_csv(path, data)
    back = dataio.load_csv(path, label_map={"1": 1, "2": 2})
    np.testing.assert_array_equal(back.features, X)
    np.testing.assert_array_equal(back.labels, labels)


# -- normalization --------------------------------------------------------------------

def test_minmax_column():
    X = np.array([[0.0], [5.0], [10.0]])
    np.testing.assert_array_equal(dataio.normalize_apply(dataio.normalize_fit(X), X), [[0], [0.5], [1]])


def test_minmax_constant_column():
    X = np.full((3, 1), 7.0)
    np.testing.assert_array_equal(dataio.normalize_apply(dataio.normalize_fit(X), X), np.zeros((3, 1)))


def test_minmax_unseen_value_not_clipped():
    params = dataio.normalize_fit(np.array([[0.0], [10.0]]))
    assert dataio.normalize_apply(params, np.array([[20.0]]))[0, 0] == (20 - 0) / (10 - 0)


def test_zscore_and_none():
    X = np.array([[1.0, 2.0], [3.0, 2.0], [5.0, 2.0]])
    Z = dataio.normalize_apply(dataio.normalize_fit(X, "zscore"), X)
    np.testing.assert_allclose(Z[:, 0].mean(), 0, atol=1e-15)
    np.testing.assert_allclose(Z[:, 0].std(), 1, rtol=1e-15)
    np.testing.assert_array_equal(Z[:, 1], 0)
    np.testing.assert_array_equal(dataio.normalize_apply(dataio.normalize_fit(X, "none"), X), X)
    with pytest.raises(ValueError):
        dataio.normalize_fit(X, "robust")


@settings(max_examples=100, deadline=None)
@given(hnp.arrays(np.float64, st.tuples(st.integers(2, 10), st.integers(1, 4)),
                  elements=st.floats(-1e6, 1e6)))
def test_minmax_range_property(X):
    Y = dataio.normalize_apply(dataio.normalize_fit(X), X)
    for j in range(X.shape[1]):
        if np.ptp(X[:, j]) > 0:
            assert Y[:, j].min() == 0.0
            assert Y[:, j].max() == pytest.approx(1.0, abs=1e-12)


# -- split_classes --------------------------------------------------------------------

def test_split_small():
    data = dataio.Dataset(np.arange(6.0).reshape(3, 2), np.array([1, 2, 1]))
    A, B = dataio.split_classes(data)
    np.testing.assert_array_equal(A, [[0, 1], [4, 5]])
    np.testing.assert_array_equal(B, [[2, 3]])


def test_split_single_class():
    with pytest.raises(EmptyClass):
        dataio.split_classes(dataio.Dataset(np.ones((3, 2)), np.ones(3, dtype=int)))


def test_split_permuted_multiset():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(30, 3))
    y = rng.integers(1, 3, 30)
    perm = rng.permutation(30)
    A, B = dataio.split_classes(dataio.Dataset(X[perm], y[perm]))
    original = sorted(map(tuple, X))
    assert sorted(map(tuple, np.vstack([A, B]))) == original


# -- make_folds -----------------------------------------------------------------------

def fold_class_counts(plan, labels):
    return [Counter(labels[plan.assignments == f].tolist()) for f in range(plan.k)]


def test_folds_balanced():
    data = dataio.Dataset(np.zeros((100, 1)), np.repeat([1, 2], 50))
    for counts in fold_class_counts(dataio.make_folds(data, 10), data.labels):
        assert counts == {1: 5, 2: 5}


def test_folds_leave_one_out():
    data = dataio.Dataset(np.zeros((10, 1)), np.repeat([1, 2], 5))
    plan = dataio.make_folds(data, 10)
    assert sorted(plan.assignments.tolist()) == list(range(10))


def test_folds_imbalanced():
    data = dataio.Dataset(np.zeros((100, 1)), np.r_[np.ones(70, int), np.full(30, 2)])
    for counts in fold_class_counts(dataio.make_folds(data, 10, seed=3), data.labels):
        assert abs(counts[1] - 7) <= 1 and abs(counts[2] - 3) <= 1


def test_folds_errors_and_determinism():
    data = dataio.Dataset(np.zeros((5, 1)), np.array([1, 2, 1, 2, 1]))
    with pytest.raises(TooFewSamples):
        dataio.make_folds(data, 10)
    big = dataio.synth_blobs(20)
    np.testing.assert_array_equal(dataio.make_folds(big, 5, seed=4).assignments,
                                  dataio.make_folds(big, 5, seed=4).assignments)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 60), st.integers(1, 60), st.integers(2, 12), st.integers(0, 10**6))
def test_folds_partition_and_stratification(m1, m2, k, seed):
    if m1 + m2 < k:
        return
    labels = np.r_[np.ones(m1, int), np.full(m2, 2)]
    plan = dataio.make_folds(dataio.Dataset(np.zeros((m1 + m2, 1)), labels), k, seed)
    sizes = np.bincount(plan.assignments, minlength=k)
    assert sizes.sum() == m1 + m2 and sizes.max() - sizes.min() <= 1
    for cls, mc in ((1, m1), (2, m2)):
        per = np.bincount(plan.assignments[labels == cls], minlength=k)
        assert per.max() - per.min() <= 1 and per.sum() == mc


def test_fold_plan_tsv():
    plan = dataio.make_folds(dataio.synth_blobs(5), 5)
    lines = plan.to_tsv().splitlines()
    assert lines[0] == "sample_index\tfold" and len(lines) == 11
    train, test = plan.train_test(0)
    assert len(train) + len(test) == 10 and not set(train) & set(test)


# -- synthetic fixtures ---------------------------------------------------------------

def test_cross_planes_exact():
    A, B = dataio.split_classes(dataio.synth_cross_planes(25))
    np.testing.assert_array_equal(A[:, 0], A[:, 1])
    np.testing.assert_array_equal(B[:, 0], -B[:, 1])


@pytest.mark.parametrize("seed", range(5))
def test_blobs_separable(seed):
    A, B = dataio.split_classes(dataio.synth_blobs(50, separation=10.0, seed=seed))
    assert linearly_separable(A, B)


def test_xor_not_separable():
    A, B = dataio.split_classes(dataio.synth_xor())
    assert not linearly_separable(A, B)
    assert linearly_separable(A[:1], B)
