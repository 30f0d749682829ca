import numpy as np
import pytest

from ofter.analyze import (
    OutlierMonitor,
    detect_outliers,
    feature_importance,
    minimum_distances,
)
from ofter.regress import FeatureWeights


class TestFeatureImportance:
    def test_identity_embedding_uniform_weights(self):
        d = 5
        report = feature_importance(np.eye(d), FeatureWeights.uniform(d))
        assert np.allclose(report.importance, 2.0 / d)

    def test_matches_finite_difference(self):
        # oracle: numerically differentiate D'^2 = sum_j v_j (U^T D)_j^2 at D = 1
        rng = np.random.default_rng(0)
        d, p = 6, 3
        U, _ = np.linalg.qr(rng.standard_normal((d, d)))
        U = U[:, :p]
        v = rng.uniform(0.1, 1.0, p)
        v /= v.sum()

        def dist2(D):
            return float(np.sum(v * (U.T @ D) ** 2))

        eps = 1e-6
        base = np.ones(d)
        fd = np.empty(d)
        for j in range(d):
            up, dn = base.copy(), base.copy()
            up[j] += eps
            dn[j] -= eps
            fd[j] = (dist2(up) - dist2(dn)) / (2 * eps)
        report = feature_importance(U, FeatureWeights(v))
        assert np.allclose(report.importance, np.abs(fd), atol=1e-6)

    def test_zero_weight_features_score_zero(self):
        rng = np.random.default_rng(1)
        d = 4
        U = np.eye(d)
        v = np.array([0.6, 0.4, 0.0, 0.0])
        report = feature_importance(U, FeatureWeights(v))
        assert report.importance[2] == 0.0 and report.importance[3] == 0.0

    def test_sign_flip_invariance(self):
        rng = np.random.default_rng(2)
        d, p = 7, 4
        U, _ = np.linalg.qr(rng.standard_normal((d, d)))
        U = U[:, :p]
        v = rng.uniform(0, 1, p)
        v /= v.sum()
        flip = U.copy()
        flip[:, [1, 3]] *= -1
        a = feature_importance(U, FeatureWeights(v)).importance
        b = feature_importance(flip, FeatureWeights(v)).importance
        assert np.allclose(a, b)

    def test_augmented_scatter(self):
        U = np.eye(3)[:, :2]  # d=3, p=2
        v = np.array([0.5, 0.25, 0.25])  # two embedded + one augmented
        report = feature_importance(U, FeatureWeights(v), augmented_indices=(2,))
        # third original feature gets its augmented weight straight through
        assert abs(report.importance[2] - 2 * 0.25) < 1e-15


class TestDetectOutliers:
    def test_zero_iqr_branch(self):
        w = FeatureWeights.uniform(1)
        lookback = 5
        # trailing d_min history all 1.0, then a 1.5 arrives: flagged
        rows = [[0.0], [1.0]]
        for _ in range(20):
            rows.append([rows[-1][0] + 1.0])
        X = np.asarray(rows, dtype=float)
        rep = detect_outliers(X, w, lookback, kappa=5.0)
        inner = rep.d_min[lookback:]
        assert np.allclose(inner, 1.0)  # uniform spacing: every d_min is 1
        X2 = X.copy()
        X2[-1, 0] += 0.5  # last step jumps by 1.5 instead of 1
        rep2 = detect_outliers(X2, w, lookback, kappa=5.0)
        assert rep2.flags[-1]

    def test_duplicate_point_never_flagged(self):
        rng = np.random.default_rng(3)
        X = rng.standard_normal((40, 2))
        X[-1] = X[-10]  # exact repeat of a recent row
        rep = detect_outliers(X, FeatureWeights.uniform(2), 10, kappa=1.0)
        assert rep.d_min[-1] == 0.0
        assert not rep.flags[-1]

    def test_flag_monotonicity_in_kappa(self):
        rng = np.random.default_rng(4)
        X = rng.standard_normal((80, 3))
        w = FeatureWeights.uniform(3)
        loose = detect_outliers(X, w, 15, kappa=1.0).flags
        tight = detect_outliers(X, w, 15, kappa=3.0).flags
        assert not np.any(tight & ~loose)

    def test_mean_statistic_option(self):
        rng = np.random.default_rng(5)
        X = rng.standard_normal((50, 2))
        w = FeatureWeights.uniform(2)
        d_mean = minimum_distances(X, w, 10, statistic="mean")
        d_min = minimum_distances(X, w, 10, statistic="min")
        assert np.all(d_mean[10:] >= d_min[10:])

    def test_too_short_history(self):
        with pytest.raises(ValueError):
            detect_outliers(np.zeros((5, 1)), FeatureWeights.uniform(1), 10, 5.0)

    def test_monitor_agrees_with_offline(self):
        rng = np.random.default_rng(6)
        X = rng.standard_normal((70, 2))
        w = FeatureWeights.uniform(2)
        rep = detect_outliers(X, w, 12, kappa=2.0)
        mon = OutlierMonitor(w, 12, kappa=2.0)
        flags = []
        dmins = []
        for row in X:
            d, f = mon.push(row)
            dmins.append(d)
            flags.append(f)
        assert np.allclose(np.asarray(dmins)[12:], rep.d_min[12:])
        assert list(flags) == list(rep.flags)
