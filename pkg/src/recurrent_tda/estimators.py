"""Scikit-learn style transformers wrapping the denoising filters.

Each estimator learns its smoothing operator from the rows of ``X`` in
``fit`` (row order is sample-time order) and applies it in ``transform``.
They are transductive: ``transform`` expects a matrix with the same number
of rows as the fitted one, and ``fit_transform(X)`` is the denoised
signal.  Parameters follow the usual ``get_params`` contract, so the
transformers compose with pipelines, grid search and ``clone``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from recurrent_tda.denoise import (
    AXIS_EQUALIZATION,
    _average_over_mask,
    _boxcar,
    _neighborhood_mask,
    segment_windows,
    topological_smooth,
)
from recurrent_tda.validation import check_points


def _require_fitted(estimator, attribute: str):
    if not hasattr(estimator, attribute):
        raise NotFittedError(
            f"{type(estimator).__name__} must be fitted before calling transform"
        )


def _check_same_samples(estimator, X):
    X = check_points(np.asarray(X), "X")
    if X.shape[0] != estimator.n_samples_:
        raise ValueError(
            f"X has {X.shape[0]} rows but the estimator was fitted on {estimator.n_samples_}"
        )
    return X


class TopologicalDenoiser(BaseEstimator, TransformerMixin):
    """State-space averaging at the death scale of the dominant loop.

    ``neighborhood="ellipsoidal"`` aligns neighbourhoods with the local
    flow at axis ratio ``rho``; ``"spherical"`` uses isotropic ones (the
    same pipeline with ``rho`` forced to 1).

    Attributes after ``fit``: ``alpha_star_`` (averaging scale),
    ``diagram_`` (persistence diagram), ``neighbor_mask_`` (boolean
    membership matrix).
    """

    def __init__(
        self,
        neighborhood="ellipsoidal",
        rho=3.0,
        gradient_window=3,
        degenerate_tolerance=1e-8,
        search_tol=1e-6,
        alpha_max=None,
        axis_equalization=AXIS_EQUALIZATION,
    ):
        self.neighborhood = neighborhood
        self.rho = rho
        self.gradient_window = gradient_window
        self.degenerate_tolerance = degenerate_tolerance
        self.search_tol = search_tol
        self.alpha_max = alpha_max
        self.axis_equalization = axis_equalization

    def fit(self, X, y=None):
        if self.neighborhood not in ("ellipsoidal", "spherical"):
            raise ValueError(
                f"neighborhood must be 'ellipsoidal' or 'spherical', got {self.neighborhood!r}"
            )
        X = check_points(np.asarray(X), "X")
        rho = self.rho if self.neighborhood == "ellipsoidal" else 1.0
        result = topological_smooth(
            X,
            rho=rho,
            gradient_window=self.gradient_window,
            degenerate_tolerance=self.degenerate_tolerance,
            search_tol=self.search_tol,
            alpha_max=self.alpha_max,
            axis_equalization=self.axis_equalization,
        )
        self.n_samples_, self.n_features_in_ = X.shape
        self.alpha_star_ = result.alpha_star
        self.diagram_ = result.diagram
        self.neighbor_mask_ = _neighborhood_mask(result.scale_matrix, result.alpha_star)
        return self

    def transform(self, X):
        _require_fitted(self, "neighbor_mask_")
        X = _check_same_samples(self, X)
        return _average_over_mask(self.neighbor_mask_, X)


class KNNDenoiser(BaseEstimator, TransformerMixin):
    """Average each sample with its ``k`` nearest state-space neighbours."""

    def __init__(self, k=20):
        self.k = k

    def fit(self, X, y=None):
        X = check_points(np.asarray(X), "X")
        if not 1 <= self.k < X.shape[0]:
            raise ValueError(f"k must satisfy 1 <= k < n = {X.shape[0]}, got {self.k}")
        diff = X[:, None, :] - X[None, :, :]
        dist = (diff * diff).sum(-1)
        np.fill_diagonal(dist, np.inf)
        self.n_samples_, self.n_features_in_ = X.shape
        self.neighbors_ = np.argsort(dist, axis=1, kind="stable")[:, : self.k]
        return self

    def transform(self, X):
        _require_fitted(self, "neighbors_")
        X = _check_same_samples(self, X)
        return (X + X[self.neighbors_].sum(axis=1)) / (self.k + 1)


class MovingAverageDenoiser(BaseEstimator, TransformerMixin):
    """Centered boxcar over ``window`` samples, truncated at the ends."""

    def __init__(self, window=20):
        self.window = window

    def fit(self, X, y=None):
        X = check_points(np.asarray(X), "X")
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")
        self.n_samples_, self.n_features_in_ = X.shape
        return self

    def transform(self, X):
        _require_fitted(self, "n_samples_")
        X = _check_same_samples(self, X)
        return _boxcar(X, int(self.window))


class AdaptiveMovingAverageDenoiser(BaseEstimator, TransformerMixin):
    """Boxcar whose window tracks each segment's dominant frequency.

    ``sample_rate`` is the sampling frequency of the rows; the fitted
    windows (one per segment and channel) follow the Nyquist rule
    ``round(sample_rate / (2 * f_dominant))`` clamped to ``[2, segment]``,
    falling back to ``FALLBACK_WINDOW`` on spectrally flat segments.
    """

    def __init__(self, segment=100, sample_rate=1.0):
        self.segment = segment
        self.sample_rate = sample_rate

    def fit(self, X, y=None):
        X = check_points(np.asarray(X), "X")
        if self.segment < 4:
            raise ValueError(f"segment must be >= 4, got {self.segment}")
        if not self.sample_rate > 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        self.n_samples_, self.n_features_in_ = X.shape
        self.windows_ = segment_windows(X, int(self.segment), float(self.sample_rate))
        return self

    def transform(self, X):
        _require_fitted(self, "windows_")
        X = _check_same_samples(self, X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} channels but the estimator was fitted on {self.n_features_in_}"
            )
        out = np.empty_like(X)
        seg = int(self.segment)
        for s in range(self.windows_.shape[0]):
            sl = slice(s * seg, min((s + 1) * seg, X.shape[0]))
            for c in range(X.shape[1]):
                out[sl, c] = _boxcar(X[sl, c : c + 1], int(self.windows_[s, c]))[:, 0]
        return out
