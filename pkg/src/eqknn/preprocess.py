"""Feature normalization into the hypercube [-1/(2 sqrt d), 1/(2 sqrt d)]^d.

After the map every training vector has norm at most 1/2, so any two
normalized vectors are at squared Euclidean distance at most 1.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted


class Normalizer(TransformerMixin, BaseEstimator):
    """Center on the training mid-range and divide by ``range * sqrt(d)``.

    Constant features get a range of 1.  :meth:`transform` applies the affine
    map only (training data); :meth:`transform_test` additionally clips each
    feature to the target interval, which is how held-out instances are
    handled.

    Attributes
    ----------
    center_ : ndarray of shape (n_features,)
        ``(max + min) / 2`` of each training feature.
    scale_ : ndarray of shape (n_features,)
        ``(max - min) * sqrt(d)``, with ``max - min`` replaced by 1 when zero.
    bound_ : float
        Half-width ``1 / (2 sqrt(d))`` of the target interval.
    """

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        d = X.shape[1]
        lo, hi = X.min(axis=0), X.max(axis=0)
        span = hi - lo
        span[span == 0] = 1.0
        self.center_ = (hi + lo) / 2.0
        self.scale_ = span * np.sqrt(d)
        self.data_min_ = lo
        self.data_range_ = span
        # 1/2 for ordinary features, 0 for constant ones (which sit at the center)
        self._offset = (hi - lo) / (2.0 * span)
        self.bound_ = 1.0 / (2.0 * np.sqrt(d))
        self.n_features_in_ = d
        return self

    def _check(self, X):
        check_is_fitted(self, "scale_")
        X = check_array(X, dtype=np.float64, ensure_2d=False)
        squeeze = X.ndim == 1
        X = np.atleast_2d(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return X, squeeze

    def _affine(self, X):
        # same map as (X - center_) / scale_, but training rows land in
        # [0, 1] before the shift, so they cannot overshoot the bound
        return ((X - self.data_min_) / self.data_range_ - self._offset) / np.sqrt(self.n_features_in_)

    def transform(self, X):
        X, squeeze = self._check(X)
        out = self._affine(X)
        return out[0] if squeeze else out

    def transform_test(self, X):
        X, squeeze = self._check(X)
        with np.errstate(over="ignore"):
            out = np.clip(self._affine(X), -self.bound_, self.bound_)
        return out[0] if squeeze else out
