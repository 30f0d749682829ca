"""Feature importance and distance-based outlier detection.

Importance is the gradient of the squared weighted embedding distance with
respect to per-feature displacements, evaluated at a unit displacement in
every coordinate: original features that feed heavily-weighted embedding
directions score high, and features behind thresholded-out columns score
exactly zero.  Outliers are time points whose nearest neighbor in the
trailing window sits far outside the recent distribution of such
nearest-neighbor distances (an interquartile-range rule).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ofter.embed import EmbeddingState
from ofter.regress import FeatureWeights, weighted_distances


@dataclass(frozen=True)
class ImportanceReport:
    importance: np.ndarray
    labels: tuple

    def rows(self):
        return list(zip(self.labels, self.importance))


@dataclass(frozen=True)
class OutlierReport:
    d_min: np.ndarray
    flags: np.ndarray
    kappa: float
    lookback: int


def feature_importance(embedding, weights: FeatureWeights, augmented_indices=(),
                       labels=None) -> ImportanceReport:
    """Sensitivity of the weighted embedding distance to each original feature.

    ``embedding`` is an EmbeddingState or a raw d x p projection matrix
    (identity for configurations without dimensionality reduction).  The
    weight vector covers the p embedded columns followed by any augmented
    original columns, whose positions in the original feature space are
    given by ``augmented_indices``.
    """
    if isinstance(embedding, EmbeddingState):
        U = embedding.components
    else:
        U = np.asarray(embedding, dtype=float)
    d, p = U.shape
    augmented_indices = tuple(int(i) for i in augmented_indices)
    v = weights.v
    if v.size != p + len(augmented_indices):
        raise ValueError("weight length must equal embedded plus augmented columns")
    v_embed = v[:p]
    v2 = np.zeros(d)
    for pos, col in enumerate(augmented_indices):
        v2[col] = v[p + pos]
    grad = 2.0 * np.abs(U @ ((U.T @ np.ones(d)) * v_embed) + v2)
    if labels is None:
        labels = tuple(f"x{j}" for j in range(d))
    return ImportanceReport(importance=grad, labels=tuple(labels))


def minimum_distances(embedded, weights: FeatureWeights, lookback: int,
                      statistic: str = "min") -> np.ndarray:
    """Per-row distance to the trailing window (NaN before one lookback)."""
    X = np.asarray(embedded, dtype=float)
    n = X.shape[0]
    if n <= lookback + 1:
        raise ValueError(f"history of {n} rows is too short for lookback {lookback}")
    if statistic not in ("min", "mean"):
        raise ValueError("statistic must be 'min' or 'mean'")
    out = np.full(n, np.nan)
    for t in range(lookback, n):
        d = weighted_distances(X[t - lookback : t], X[t], weights)
        out[t] = d.min() if statistic == "min" else d.mean()
    return out


def detect_outliers(embedded, weights: FeatureWeights, lookback: int,
                    kappa: float, statistic: str = "min") -> OutlierReport:
    """Flag rows whose neighbor distance escapes the trailing IQR fence.

    A row t is flagged when d_min[t] > q3 + kappa * (q3 - q1), with the
    quartiles (linear interpolation) taken over the previous ``lookback``
    d_min values; flags therefore start after two lookback spans.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    d_min = minimum_distances(embedded, weights, lookback, statistic)
    n = d_min.size
    flags = np.zeros(n, dtype=bool)
    for t in range(2 * lookback, n):
        window = d_min[t - lookback : t]
        q1, q3 = np.quantile(window, [0.25, 0.75])
        flags[t] = d_min[t] > q3 + kappa * (q3 - q1)
    return OutlierReport(d_min=d_min, flags=flags, kappa=float(kappa), lookback=lookback)


class OutlierMonitor:
    """Streaming variant of the detector sharing the same rule."""

    def __init__(self, weights: FeatureWeights, lookback: int, kappa: float,
                 statistic: str = "min"):
        self.weights = weights
        self.lookback = lookback
        self.kappa = kappa
        self.statistic = statistic
        self._rows = []
        self._d_hist = []

    def push(self, row) -> tuple:
        """Add one embedded row; returns (d_min, flag) for that time point."""
        row = np.asarray(row, dtype=float)
        d_min = np.nan
        flag = False
        if len(self._rows) >= self.lookback:
            window = np.asarray(self._rows[-self.lookback :])
            d = weighted_distances(window, row, self.weights)
            d_min = float(d.min() if self.statistic == "min" else d.mean())
            history = [x for x in self._d_hist[-self.lookback :] if not np.isnan(x)]
            if len(history) == self.lookback:
                q1, q3 = np.quantile(history, [0.25, 0.75])
                flag = d_min > q3 + self.kappa * (q3 - q1)
        self._rows.append(row)
        self._d_hist.append(d_min)
        return d_min, flag
