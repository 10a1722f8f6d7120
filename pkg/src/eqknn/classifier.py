"""scikit-learn compatible front end for the quantum k-NN classifier."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils import check_random_state
from sklearn.utils.multiclass import check_classification_targets
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .circuit import DEFAULT_PSEUDOCOUNTS, DEFAULT_SHOTS
from .encode import EncodingKind
from .estimate import DistanceEstimateKind
from .knn import MODALITIES, classical_distances, majority_vote, quantum_distances, select_neighbors
from .preprocess import Normalizer
from .seeding import derive_seed


class QuantumKNNClassifier(ClassifierMixin, BaseEstimator):
    """k-NN classifier whose Euclidean distances come from a simulated circuit.

    Parameters
    ----------
    n_neighbors : int, default=3
    modality : {"classical", "statevector", "simulation"}, default="statevector"
        ``classical`` computes distances directly, ``statevector`` reads the
        exact output probabilities, ``simulation`` estimates them from
        ``shots`` sampled measurements.
    encoding : {"extension", "translation"}, default="extension"
    estimate : {"avg", "diff"}, default="avg"
    shots : int, default=1024
        Only used by ``simulation``.
    pseudocounts : int, default=10
        Laplace pseudocounts per significant (b, j) cell, ``simulation`` only.
    random_state : int, RandomState instance or None, default=None
        Root seed; the k-th query row of a ``predict`` call is sampled with
        ``derive_seed(root, k)``.
    """

    def __init__(self, n_neighbors=3, modality="statevector", encoding="extension", estimate="avg",
                 shots=DEFAULT_SHOTS, pseudocounts=DEFAULT_PSEUDOCOUNTS, random_state=None):
        self.n_neighbors = n_neighbors
        self.modality = modality
        self.encoding = encoding
        self.estimate = estimate
        self.shots = shots
        self.pseudocounts = pseudocounts
        self.random_state = random_state

    def _validate_params(self):
        if self.modality not in MODALITIES:
            raise ValueError(f"modality must be one of {MODALITIES}, got {self.modality!r}")
        EncodingKind(self.encoding)
        DistanceEstimateKind(self.estimate)
        if int(self.n_neighbors) < 1:
            raise ValueError("n_neighbors must be positive")
        if self.modality == "simulation" and (int(self.shots) < 1 or int(self.pseudocounts) < 0):
            raise ValueError("shots must be positive and pseudocounts non-negative")

    def fit(self, X, y):
        self._validate_params()
        X, y = check_X_y(X, y, dtype=np.float64)
        check_classification_targets(y)
        if self.n_neighbors > X.shape[0]:
            raise ValueError(f"n_neighbors={self.n_neighbors} exceeds {X.shape[0]} training samples")
        self.classes_ = np.unique(y)
        self.normalizer_ = Normalizer().fit(X)
        self.train_ = self.normalizer_.transform(X)
        self.y_ = y
        self.n_features_in_ = X.shape[1]
        return self

    def _distances(self, X):
        check_is_fitted(self, "train_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        V = self.normalizer_.transform_test(X)
        if self.modality == "classical":
            return [classical_distances(self.train_, v) for v in V]
        shots, root = None, None
        if self.modality == "simulation":
            shots = int(self.shots)
            root = check_random_state(self.random_state).randint(np.iinfo(np.int32).max) \
                if not isinstance(self.random_state, (int, np.integer)) else int(self.random_state)
        tables = []
        for row, v in enumerate(V):
            seed = None if root is None else derive_seed(root, row)
            tables.append(quantum_distances(self.train_, v, self.encoding, [self.estimate], shots,
                                            int(self.pseudocounts), seed)[self.estimate])
        return tables

    def kneighbors(self, X, n_neighbors=None, return_distance=True):
        k = self.n_neighbors if n_neighbors is None else n_neighbors
        results = [select_neighbors(t, k) for t in self._distances(X)]
        idx = np.array([r.k_set for r in results])
        if not return_distance:
            return idx
        dist = np.array([r.distances.distances[r.k_set] for r in results])
        return dist, idx

    def predict(self, X):
        idx = self.kneighbors(X, return_distance=False)
        return np.array([majority_vote(row, self.y_) for row in idx])
