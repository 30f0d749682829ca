"""Online multivariate time-series forecasting toolkit.

The pipeline combines a streaming principal-component embedding (updated
per observation through rank-one spectral updates), correlation-driven
feature weighting, and an online-selected bank of kernel, neighbor, and
linear forecasters, on top of a time-series/residual decomposition of the
target.
"""

from ofter.embed import EmbeddingState, StreamingPCA, fit_pca, online_update, project
from ofter.frame import TimePanel, build_lagged_features, load_csv, prune_rank_deficient, standardize
from ofter.maxcorr import osmc, osmc_fit
from ofter.pipeline import OfterConfig, OfterForecaster, align_next_step, initialize, run
from ofter.regress import FeatureWeights, grnn_forecast, knn_forecast, ols_fit, weighted_distance
from ofter.spectra import EigenSystem, RankOneUpdate, full_eig, rank_one_update, secular_roots

__version__ = "0.1.0"

__all__ = [
    "EigenSystem",
    "EmbeddingState",
    "FeatureWeights",
    "OfterConfig",
    "OfterForecaster",
    "RankOneUpdate",
    "StreamingPCA",
    "TimePanel",
    "align_next_step",
    "build_lagged_features",
    "fit_pca",
    "full_eig",
    "grnn_forecast",
    "initialize",
    "knn_forecast",
    "load_csv",
    "ols_fit",
    "online_update",
    "osmc",
    "osmc_fit",
    "project",
    "prune_rank_deficient",
    "rank_one_update",
    "run",
    "secular_roots",
    "standardize",
    "weighted_distance",
]
