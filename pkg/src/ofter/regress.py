"""Weighted distances and the three forecaster families: kNN, GRNN, OLS."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FeatureWeights:
    """Non-negative per-column weights summing to one (or all zero)."""

    v: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float)
        if v.ndim != 1:
            raise ValueError("weights must be a vector")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValueError("weights must be finite and non-negative")
        total = v.sum()
        if total != 0.0 and abs(total - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1 (or be identically zero)")
        v.setflags(write=False)
        object.__setattr__(self, "v", v)

    @property
    def is_zero(self) -> bool:
        return float(self.v.sum()) == 0.0

    @classmethod
    def uniform(cls, n: int) -> "FeatureWeights":
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def from_scores(cls, scores, threshold: float) -> "FeatureWeights":
        """Squared scores, zeroed below the threshold, normalized.

        Returns the zero vector when every score falls below the threshold.
        """
        c = np.asarray(scores, dtype=float)
        sq = np.where(np.abs(c) >= threshold, c ** 2, 0.0)
        total = sq.sum()
        if total == 0.0:
            return cls(np.zeros(c.size))
        return cls(sq / total)


def weighted_distance(a, b, weights: FeatureWeights) -> float:
    """sqrt(sum_j v_j (a_j - b_j)^2)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.shape != weights.v.shape:
        raise ValueError("length mismatch")
    diff = a - b
    return float(np.sqrt(np.sum(weights.v * diff * diff)))


def weighted_distances(history, query, weights: FeatureWeights) -> np.ndarray:
    """Distances from every history row to the query, in row order."""
    history = np.asarray(history, dtype=float)
    query = np.asarray(query, dtype=float)
    if history.ndim != 2 or history.shape[1] != query.shape[0]:
        raise ValueError("shape mismatch")
    diff = history - query
    return np.sqrt((diff * diff) @ weights.v)


def knn_from_distances(distances, targets, k: int) -> float:
    """Mean target over the k smallest distances; ties go to earlier rows."""
    n = distances.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range for a window of {n}")
    # stable argsort implements the earlier-time tie break
    order = np.argsort(distances, kind="stable")[:k]
    return float(np.mean(targets[order]))


def knn_forecast(history, targets, query, k: int, weights: FeatureWeights) -> float:
    """k-nearest-neighbor mean under the weighted norm."""
    targets = np.asarray(targets, dtype=float)
    d = weighted_distances(history, query, weights)
    return knn_from_distances(d, targets, k)


def grnn_from_distances(distances, targets, s: float) -> float:
    """Kernel-weighted mean with bandwidth = median distance / s.

    Weights are exp(-d^2/h) normalized; the exponent is shifted by its
    maximum before exponentiation so extreme scalings cannot underflow to
    an all-zero weight vector.  With a zero median (duplicate-heavy
    windows) the smallest positive distance substitutes; if every distance
    is zero the window mean is returned.
    """
    if s <= 0:
        raise ValueError("scaling factor must be positive")
    d = np.asarray(distances, dtype=float)
    if d.size == 0:
        raise ValueError("empty window")
    if not np.all(np.isfinite(d)):
        raise ValueError("non-finite distances")
    med = float(np.median(d))
    if med == 0.0:
        positive = d[d > 0]
        if positive.size == 0:
            return float(np.mean(targets))
        med = float(positive.min())
    h = med / s
    expo = -(d * d) / h
    expo -= expo.max()
    w = np.exp(expo)
    w /= w.sum()
    return float(w @ np.asarray(targets, dtype=float))


def grnn_forecast(history, targets, query, s: float, weights: FeatureWeights) -> float:
    """Kernel regression forecast under the weighted norm."""
    d = weighted_distances(history, query, weights)
    return grnn_from_distances(d, np.asarray(targets, dtype=float), s)


@dataclass(frozen=True)
class OlsModel:
    beta0: float
    beta: np.ndarray

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=float)
        if not np.isfinite(self.beta0) or not np.all(np.isfinite(beta)):
            raise ValueError("non-finite coefficients")
        object.__setattr__(self, "beta", beta)


def ols_fit(X, y, warn: bool = True) -> OlsModel:
    """Least squares with intercept; falls back to a tiny ridge when the
    design is rank deficient (with a warning unless ``warn`` is off, for
    callers whose designs are collinear by construction)."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ValueError("inconsistent design shapes")
    n, d = X.shape
    if n <= d:
        raise ValueError(f"need more rows ({n}) than columns ({d})")
    A = np.hstack([np.ones((n, 1)), X])
    coef, _, rank, _ = np.linalg.lstsq(A, y, rcond=None)
    if rank < d + 1:
        if warn:
            warnings.warn("rank-deficient regression design; using ridge fallback",
                          RuntimeWarning, stacklevel=2)
        gram = A.T @ A + 1e-8 * np.eye(d + 1)
        coef = np.linalg.solve(gram, A.T @ y)
    return OlsModel(beta0=float(coef[0]), beta=coef[1:])


def ols_predict(model: OlsModel, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != model.beta.shape:
        raise ValueError("dimension mismatch")
    return float(model.beta0 + model.beta @ x)
