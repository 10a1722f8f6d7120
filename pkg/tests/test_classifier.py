import numpy as np
import pytest
from sklearn.base import clone
from sklearn.model_selection import cross_val_score
from sklearn.neighbors import KNeighborsClassifier
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from eqknn import QuantumKNNClassifier, iris_pair
from eqknn.preprocess import Normalizer


@pytest.fixture(scope="module")
def iris():
    ds = iris_pair("01_iris_versicolor_virginica")
    return ds.instances, ds.labels


def test_params_roundtrip():
    clf = QuantumKNNClassifier(n_neighbors=5, encoding="translation", estimate="diff")
    params = clf.get_params()
    assert params["n_neighbors"] == 5 and params["encoding"] == "translation"
    again = clone(clf).set_params(modality="simulation", shots=2048)
    assert again.get_params()["shots"] == 2048 and again.estimate == "diff"


@pytest.mark.parametrize("encoding", ["extension", "translation"])
def test_statevector_matches_classical(iris, encoding):
    X, y = iris
    train, test = np.arange(0, 100, 2), np.arange(1, 100, 2)
    classical = QuantumKNNClassifier(5, modality="classical").fit(X[train], y[train])
    quantum = QuantumKNNClassifier(5, encoding=encoding).fit(X[train], y[train])
    np.testing.assert_array_equal(classical.predict(X[test]), quantum.predict(X[test]))
    dc, ic = classical.kneighbors(X[test])
    dq, iq = quantum.kneighbors(X[test])
    # iris has duplicate rows: at distance 0 the square root lifts ~1e-17 of
    # rounding to ~1e-9, so compare squared distances
    np.testing.assert_allclose(dc ** 2, dq ** 2, atol=1e-12)


def test_classical_matches_sklearn_on_normalized(iris):
    X, y = iris
    nrm = Normalizer().fit(X[:70])
    ours = QuantumKNNClassifier(3, modality="classical").fit(X[:70], y[:70])
    ref = KNeighborsClassifier(3).fit(nrm.transform(X[:70]), y[:70])
    _, ours_idx = ours.kneighbors(X[70:])
    ref_dist, _ = ref.kneighbors(nrm.transform_test(X[70:]))
    ours_dist, _ = ours.kneighbors(X[70:])
    np.testing.assert_allclose(ours_dist, ref_dist, atol=1e-12)


def test_simulation_reproducible(iris):
    X, y = iris
    a = QuantumKNNClassifier(3, modality="simulation", random_state=7).fit(X[:60], y[:60]).predict(X[60:])
    b = QuantumKNNClassifier(3, modality="simulation", random_state=7).fit(X[:60], y[:60]).predict(X[60:])
    np.testing.assert_array_equal(a, b)
    assert set(a) <= set(y)


def test_composes_with_pipeline_and_cv(iris):
    X, y = iris
    pipe = make_pipeline(FunctionTransformer(), QuantumKNNClassifier(3))
    scores = cross_val_score(pipe, X, y, cv=3)
    assert scores.shape == (3,) and np.all((0 <= scores) & (scores <= 1))


def test_validation_errors(iris):
    X, y = iris
    with pytest.raises(ValueError):
        QuantumKNNClassifier(200).fit(X, y)
    with pytest.raises(ValueError):
        QuantumKNNClassifier(3, modality="noisy").fit(X, y)
    with pytest.raises(ValueError):
        QuantumKNNClassifier(3, encoding="bogus").fit(X, y)
    clf = QuantumKNNClassifier(3).fit(X, y)
    with pytest.raises(ValueError):
        clf.predict(X[:, :3])


def test_unfitted():
    from sklearn.exceptions import NotFittedError
    with pytest.raises(NotFittedError):
        QuantumKNNClassifier().predict([[0.0, 1.0]])
