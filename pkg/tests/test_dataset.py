import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eqknn.dataset import Dataset, DatasetError, iris_pair, load_csv, stratified_folds, bundled_dataset_path


def test_load_csv_small(tmp_path):
    path = tmp_path / "small.csv"
    path.write_text("1.0,2.0,a\n3.0,4.0,b\n5.0,6.0,a\n")
    ds = load_csv(path, header=False)
    assert ds.n_instances == 3 and ds.n_features == 2
    np.testing.assert_array_equal(ds.instances, [[1, 2], [3, 4], [5, 6]])
    assert list(ds.labels) == ["a", "b", "a"]


def test_load_csv_label_by_name_and_position(tmp_path):
    path = tmp_path / "named.csv"
    path.write_text("cls,x,y\nA,1,2\nB,3,4\n")
    by_name = load_csv(path, label_column="cls")
    by_pos = load_csv(path, label_column=0)
    np.testing.assert_array_equal(by_name.instances, [[1, 2], [3, 4]])
    np.testing.assert_array_equal(by_name.instances, by_pos.instances)


def test_load_csv_parse_error_location(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1.0,2.0,a\nfoo,4.0,b\n")
    with pytest.raises(DatasetError, match=r"line 2, column 1"):
        load_csv(path, header=False)


def test_load_csv_ragged(tmp_path):
    path = tmp_path / "ragged.csv"
    path.write_text("1,2,a\n3,b\n")
    with pytest.raises(DatasetError, match="columns"):
        load_csv(path, header=False)


def test_load_csv_missing_file(tmp_path):
    with pytest.raises(DatasetError, match="cannot read"):
        load_csv(tmp_path / "nope.csv")


def test_bundled_iris_file():
    ds = load_csv(bundled_dataset_path("01_iris_setosa_versicolor"))
    assert (ds.n_instances, ds.n_features) == (100, 4)
    assert sorted(set(ds.labels)) == ["setosa", "versicolor"]
    np.testing.assert_allclose(ds.instances, iris_pair("01_iris_setosa_versicolor").instances)


def test_stratified_example_6_4():
    ds = Dataset(np.arange(10.0)[:, None], ["A"] * 6 + ["B"] * 4)
    split = stratified_folds(ds, 5, seed=7)
    sizes = np.bincount(split.fold_assignments, minlength=5)
    assert sizes.tolist() == [2] * 5
    b_counts = np.bincount(split.fold_assignments[6:], minlength=5)
    assert b_counts.max() == 1
    a_counts = np.bincount(split.fold_assignments[:6], minlength=5)
    assert sorted(a_counts.tolist()) == [1, 1, 1, 1, 2]


def test_stratified_deterministic():
    ds = iris_pair("01_iris_setosa_virginica")
    a = stratified_folds(ds, 5, seed=123)
    b = stratified_folds(ds, 5, seed=123)
    np.testing.assert_array_equal(a.fold_assignments, b.fold_assignments)
    c = stratified_folds(ds, 5, seed=124)
    assert not np.array_equal(a.fold_assignments, c.fold_assignments)


def test_stratified_too_many_folds():
    ds = Dataset(np.zeros((4, 1)), list("abab"))
    with pytest.raises(DatasetError):
        stratified_folds(ds, 5, seed=0)


def test_fold_csv_export(tmp_path):
    ds = Dataset(np.zeros((6, 1)), list("aabbab"))
    split = stratified_folds(ds, 2, seed=0)
    split.to_csv(tmp_path / "folds.csv")
    lines = (tmp_path / "folds.csv").read_text().splitlines()
    assert lines[0] == "index,fold" and len(lines) == 7


@settings(max_examples=60, deadline=None)
@given(counts=st.lists(st.integers(1, 15), min_size=1, max_size=4),
       folds=st.integers(2, 6), seed=st.integers(0, 2**64 - 1))
def test_stratification_invariants(counts, folds, seed):
    labels = np.repeat(np.arange(len(counts)), counts)
    if labels.size < folds:
        return
    ds = Dataset(np.zeros((labels.size, 1)), labels)
    split = stratified_folds(ds, folds, seed)
    assignments = split.fold_assignments
    assert assignments.min() >= 0 and assignments.max() < folds
    for cls in range(len(counts)):
        per_fold = np.bincount(assignments[labels == cls], minlength=folds)
        assert per_fold.max() - per_fold.min() <= 1
    all_test = np.concatenate([split.test_indices(f) for f in range(folds)])
    assert sorted(all_test.tolist()) == list(range(labels.size))
    for f in range(folds):
        assert not set(split.test_indices(f)) & set(split.train_indices(f))
