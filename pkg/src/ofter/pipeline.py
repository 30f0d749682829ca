"""End-to-end online forecasting pipeline.

Initialization runs on the training prefix only: the target is split into
a linear time-series part and a residual, the feature panel is pruned,
standardized, and (optionally) embedded, high-correlation original columns
are appended back, distance weights are scored, a linear model is fitted,
and the candidate ledger is warmed up by replaying trailing-window
forecasts inside the training segment.  The online loop then forecasts
one step at a time, observing each realized value only after its forecast
is recorded, so every forecast is a deterministic function of strictly
prior data.

Four configurations come from two switches: dimensionality reduction on
or off, and basis-transform scoring versus plain correlation scoring.
Without dimensionality reduction the panel itself is the embedding and no
eigendecomposition ever runs; without transform scoring no basis
expansion ever runs.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from sklearn.base import BaseEstimator

from ofter import arima, embed, frame, maxcorr, select
from ofter.frame import TimePanel
from ofter.regress import FeatureWeights, OlsModel, ols_fit
from ofter.select import ModelLedger

SNAPSHOT_SCHEMA_VERSION = 1

DEFAULT_S_SET = (0.001, 0.005, 0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 10.0, 50.0, 100.0)
DEFAULT_K_SET = (1, 2, 3, 5, 10, 15, 20, 30, 50)

VARIANTS = {
    "plain": (False, False),
    "dr": (True, False),
    "ft": (False, True),
    "dr-ft": (True, True),
}


@dataclass(frozen=True)
class OfterConfig:
    """All pipeline hyperparameters.

    ``use_dr`` toggles the embedding; ``use_ft`` switches feature scoring
    from plain correlation to the basis-transform score.  ``lookback`` is
    the neighbor window; thresholds gate the distance weights and the
    original-column augmentation.
    """

    use_dr: bool = True
    use_ft: bool = True
    delta: float = 0.9
    l0_fraction: float = 0.7
    lookback: int = 800
    c_min: float = 0.05
    c_original: float = 0.05
    s_set: tuple = DEFAULT_S_SET
    k_set: tuple = DEFAULT_K_SET
    p_adf: float = 0.05
    loss_kind: str = "mse"
    ols_refit_period: int = 100
    bernstein_k: int = 4
    max_lag: int = 3
    seed: int = 0
    average_candidates: bool = False
    weights_refresh_period: int | None = None
    refit_scale: bool = False
    tail_buffer: int | None = None
    max_arima_p: int = 3
    max_arima_q: int = 3
    prune_eps: float = 1e-8

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if not 0.0 < self.l0_fraction < 1.0:
            raise ValueError("l0_fraction must lie in (0, 1)")
        if not (0.0 <= self.c_min < 1.0 and 0.0 <= self.c_original < 1.0):
            raise ValueError("correlation thresholds must lie in [0, 1)")
        if self.lookback < max(self.k_set):
            raise ValueError("lookback must cover the largest neighbor count")
        if self.loss_kind not in select.LOSS_KINDS:
            raise ValueError(f"loss_kind must be one of {select.LOSS_KINDS}")
        if self.bernstein_k < 2:
            raise ValueError("bernstein_k must be at least 2")
        if self.ols_refit_period < 1:
            raise ValueError("ols_refit_period must be positive")
        object.__setattr__(self, "s_set", tuple(float(s) for s in self.s_set))
        object.__setattr__(self, "k_set", tuple(int(k) for k in self.k_set))

    @classmethod
    def for_variant(cls, name: str, **overrides) -> "OfterConfig":
        if name not in VARIANTS:
            raise ValueError(f"unknown variant {name!r}; expected one of {sorted(VARIANTS)}")
        use_dr, use_ft = VARIANTS[name]
        return cls(use_dr=use_dr, use_ft=use_ft, **overrides)

    @property
    def variant(self) -> str:
        for name, pair in VARIANTS.items():
            if pair == (self.use_dr, self.use_ft):
                return name
        raise AssertionError

    def to_dict(self) -> dict:
        return {
            "use_dr": self.use_dr, "use_ft": self.use_ft, "delta": self.delta,
            "l0_fraction": self.l0_fraction, "lookback": self.lookback,
            "c_min": self.c_min, "c_original": self.c_original,
            "s_set": list(self.s_set), "k_set": list(self.k_set),
            "p_adf": self.p_adf, "loss_kind": self.loss_kind,
            "ols_refit_period": self.ols_refit_period,
            "bernstein_k": self.bernstein_k, "max_lag": self.max_lag,
            "seed": self.seed, "average_candidates": self.average_candidates,
            "weights_refresh_period": self.weights_refresh_period,
            "refit_scale": self.refit_scale, "tail_buffer": self.tail_buffer,
            "max_arima_p": self.max_arima_p, "max_arima_q": self.max_arima_q,
            "prune_eps": self.prune_eps,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "OfterConfig":
        known = dict(payload)
        known["s_set"] = tuple(known.get("s_set", DEFAULT_S_SET))
        known["k_set"] = tuple(known.get("k_set", DEFAULT_K_SET))
        return cls(**known)


@dataclass(frozen=True)
class ForecastRecord:
    t: int
    y_hat: float
    y_hat_residual: float
    y_ts: float
    y_true: float
    winners: tuple
    diagnostic: str | None = None

    def __post_init__(self):
        if abs(self.y_hat - (self.y_hat_residual + self.y_ts)) > 1e-9 * max(1.0, abs(self.y_hat)):
            raise ValueError("record breaks the forecast recomposition identity")


class _RowBuffer:
    """Append-only float matrix with amortized growth."""

    def __init__(self, width: int, capacity: int = 64):
        self._data = np.empty((capacity, width))
        self.n = 0

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "_RowBuffer":
        buf = cls(matrix.shape[1] if matrix.ndim == 2 else 1,
                  capacity=max(64, 2 * matrix.shape[0]))
        rows = np.atleast_2d(matrix)
        buf._data[: rows.shape[0]] = rows
        buf.n = rows.shape[0]
        return buf

    def append(self, row) -> None:
        if self.n == self._data.shape[0]:
            grown = np.empty((2 * self.n, self._data.shape[1]))
            grown[: self.n] = self._data
            self._data = grown
        self._data[self.n] = row
        self.n += 1

    def window(self, start: int, stop: int) -> np.ndarray:
        return self._data[start:stop]

    def matrix(self) -> np.ndarray:
        return self._data[: self.n].copy()


@dataclass
class PipelineState:
    """Everything the online loop needs; single-writer, advanced in time order."""

    config: OfterConfig
    active: np.ndarray          # mask over input columns
    std_mean: np.ndarray        # statistics over active columns
    std_scale: np.ndarray
    labels: tuple               # names of active columns
    embedding: embed.EmbeddingState | None
    augmented: tuple            # active-column indices appended to the embedding
    weights: FeatureWeights
    weights_degenerate: bool
    ledger: ModelLedger
    ols: OlsModel
    arima_spec: arima.ArimaSpec
    arima_filter: arima.ArimaFilter
    embedded: _RowBuffer        # per-step query rows (contemporaneous projections)
    resid: _RowBuffer           # realized residual targets
    x_std: _RowBuffer           # standardized active-column rows (refit source)
    t: int                      # global index of the next step
    l0: int

    @property
    def width(self) -> int:
        return self.embedded._data.shape[1]


def _score_columns(X: np.ndarray, y: np.ndarray, use_ft: bool, n_basis: int) -> np.ndarray:
    """Per-column association score: basis-transform score or |pearson|."""
    scores = np.empty(X.shape[1])
    yc = y - y.mean()
    ynorm = float(yc @ yc)
    if ynorm == 0.0:
        return np.zeros(X.shape[1])  # constant target carries no signal
    for j in range(X.shape[1]):
        col = X[:, j]
        if np.ptp(col) == 0.0:
            scores[j] = 0.0
        elif use_ft:
            scores[j] = maxcorr.osmc(col, y, n_basis)
        else:
            cc = col - col.mean()
            denom = np.sqrt(float(cc @ cc) * ynorm)
            scores[j] = abs(float(cc @ yc) / denom) if denom > 0 else 0.0
    return scores


def select_original_features(X_std: np.ndarray, resid: np.ndarray, l0: int,
                             c_original: float, use_ft: bool, n_basis: int) -> tuple:
    """Indices of standardized columns whose training score clears the bar."""
    scores = _score_columns(X_std[:l0], resid[:l0], use_ft, n_basis)
    return tuple(int(j) for j in np.nonzero(scores >= c_original)[0])


def compute_feature_weights(X_tilde: np.ndarray, resid: np.ndarray, l0: int,
                            c_min: float, use_ft: bool, n_basis: int) -> FeatureWeights:
    """Distance weights: squared scores, thresholded, normalized.

    Returns the zero vector when everything is thresholded away; callers
    are expected to fall back to uniform weights in that case.
    """
    scores = _score_columns(X_tilde[:l0], resid[:l0], use_ft, n_basis)
    return FeatureWeights.from_scores(scores, c_min)


def _query_row(state: PipelineState, x_row: np.ndarray) -> tuple:
    """(query vector, standardized active row) for one raw input row."""
    x_active = np.asarray(x_row, dtype=float)[state.active]
    x_std = (x_active - state.std_mean) / state.std_scale
    if state.embedding is None:
        return x_std, x_std
    coords = embed.project(state.embedding, x_std)
    if state.augmented:
        coords = np.concatenate([coords, x_std[list(state.augmented)]])
    return coords, x_std


def _fold_ols(model: OlsModel, embedding, augmented: tuple, n_active: int) -> OlsModel:
    """Re-express a regression on embedded-plus-augmented features as a fixed
    linear map over the standardized columns.

    Identical predictions at fit time; between refits the map stays frozen,
    so a drifting eigenbasis cannot misalign the fitted coefficients (flat
    spectra rotate freely within near-degenerate clusters, which would
    otherwise let stale embedded-space coefficients amplify noise).
    """
    if embedding is None:
        return model
    p = embedding.p
    # projection is U^T (x / scale - mean), so the x-space coefficients are
    # (U beta)/scale and the centering folds into the intercept
    u_beta = embedding.components @ model.beta[:p]
    beta0 = model.beta0 - float(u_beta @ embedding.mean)
    b_raw = u_beta / embedding.scale
    for pos, col in enumerate(augmented):
        b_raw[col] += model.beta[p + pos]
    return OlsModel(beta0=beta0, beta=b_raw)


def _ols_value(state: PipelineState, x_std: np.ndarray) -> float:
    return state.ols.beta0 + float(state.ols.beta @ x_std)


def _update_ledger(state: PipelineState, forecasts: dict, resid_true: float,
                   y_true: float, y_ts_t: float) -> None:
    if state.config.loss_kind == "neg_pnl":
        # positions come from the recomposed forecast; gains from the
        # realized (recomposed) target
        recomposed = {lab: f + y_ts_t for lab, f in forecasts.items()}
        state.ledger = select.update_losses(
            state.ledger, recomposed, y_true, actual_return=y_true
        )
    else:
        state.ledger = select.update_losses(state.ledger, forecasts, resid_true)


def initialize(X, y, config: OfterConfig) -> PipelineState:
    """Fit every component on the training prefix (rows before L0).

    Nothing beyond row L0-1 of X or y is read here, which is what makes
    the online loop's forecasts free of look-ahead.
    """
    panel = X if isinstance(X, TimePanel) else TimePanel(
        np.asarray(X, dtype=float),
        tuple(f"x{j}" for j in range(np.asarray(X).shape[1])),
        np.arange(np.asarray(X).shape[0]),
    )
    y = np.asarray(y, dtype=float)
    n = y.size
    if panel.t_len != n:
        raise ValueError("feature rows and target length disagree")
    l0 = int(np.floor(config.l0_fraction * n))
    max_k = max(config.k_set)
    if l0 <= 2 * max_k:
        raise ValueError(f"training prefix of {l0} rows cannot warm-start "
                         f"candidates with up to {max_k} neighbors")
    if l0 >= n:
        raise ValueError("no online segment left after the training prefix")

    # target decomposition, fitted strictly on the prefix
    if l0 >= 50 and np.ptp(y[:l0]) > 0.0:
        spec, _ = arima.select_and_decompose(
            y[:l0], config.p_adf, config.max_arima_p, config.max_arima_q
        )
    else:
        spec = arima.ArimaSpec(0, 0, 0, np.zeros(0), np.zeros(0), 0.0)
    train_dec = arima.decompose_with(spec, y[:l0])
    resid_train = train_dec.residual
    filt = arima.ArimaFilter(spec)
    for val in y[:l0]:
        filt.observe(val)

    # panel hygiene on the training window
    sd = panel.values[:l0].std(axis=0, ddof=1)
    nonconstant = sd > 0
    if not nonconstant.any():
        raise ValueError("every feature column is constant on the training window")
    panel_nc = panel.select(nonconstant)
    std_panel, std_state = frame.standardize(panel_nc, (0, l0))
    train_view = TimePanel(std_panel.values[:l0], std_panel.columns, std_panel.index[:l0])
    _, keep = frame.prune_rank_deficient(train_view, config.prune_eps)
    active = nonconstant.copy()
    active[np.nonzero(nonconstant)[0][~keep]] = False
    X_std = std_panel.values[:, keep]
    labels = tuple(c for c, k in zip(std_panel.columns, keep) if k)
    std_mean = std_state.mean[keep]
    std_scale = std_state.scale[keep]

    # embedding and augmentation
    if config.use_dr:
        state_pca = embed.fit_pca(X_std[:l0], config.delta, tail_buffer=config.tail_buffer)
        train_coords = embed.project(state_pca, X_std[:l0])
        augmented = select_original_features(
            X_std, resid_train, l0, config.c_original, config.use_ft, config.bernstein_k
        )
        if augmented:
            train_matrix = np.hstack([train_coords, X_std[:l0, list(augmented)]])
        else:
            train_matrix = train_coords
    else:
        state_pca = None
        augmented = ()
        train_matrix = X_std[:l0]

    weights = compute_feature_weights(
        train_matrix, resid_train, l0, config.c_min, config.use_ft, config.bernstein_k
    )
    degenerate = weights.is_zero
    if degenerate:
        warnings.warn(
            "every feature scored below c_min; falling back to uniform weights",
            RuntimeWarning,
            stacklevel=2,
        )
        weights = FeatureWeights.uniform(train_matrix.shape[1])

    ols = _fold_ols(ols_fit(train_matrix, resid_train, warn=False),
                    state_pca, augmented, X_std.shape[1])

    # warm-start the candidate ledger inside the training segment
    ledger = ModelLedger.fresh(config.s_set, config.k_set, config.loss_kind)
    state = PipelineState(
        config=config, active=active, std_mean=std_mean, std_scale=std_scale,
        labels=labels, embedding=state_pca, augmented=augmented, weights=weights,
        weights_degenerate=degenerate, ledger=ledger, ols=ols, arima_spec=spec,
        arima_filter=filt, embedded=_RowBuffer.from_matrix(train_matrix),
        resid=_RowBuffer.from_matrix(resid_train[:, None]),
        x_std=_RowBuffer.from_matrix(X_std[:l0]), t=l0, l0=l0,
    )
    lookback = config.lookback
    for i in range(max_k, l0):
        window = state.embedded.window(max(0, i - lookback), i)
        targets = state.resid.window(max(0, i - lookback), i)[:, 0]
        forecasts = select.candidate_forecasts(
            window, targets, train_matrix[i], state.ledger, weights, ols,
            ols_value=_ols_value(state, X_std[i]),
        )
        _update_ledger(state, forecasts, resid_train[i], y[i], train_dec.y_ts[i])
    return state


def advance(state: PipelineState, x_row, y_true: float) -> ForecastRecord:
    """Forecast the next time point, then absorb its realized value.

    The forecast is computed before ``y_true`` is touched.  A numerical
    failure inside the candidate bank degrades to the trailing window mean
    and is noted on the record instead of aborting the run.
    """
    cfg = state.config
    t = state.t
    y_ts_t = state.arima_filter.predict_next()
    query, x_std = _query_row(state, x_row)

    lo = max(0, t - cfg.lookback)
    window = state.embedded.window(lo, t)
    targets = state.resid.window(lo, t)[:, 0]
    diagnostic = None
    forecasts = None
    try:
        combined, forecasts = select.step(
            window, targets, query, state.ledger, state.weights, state.ols,
            averaged=cfg.average_candidates, ols_value=_ols_value(state, x_std),
        )
        y_hat_resid = combined.value
        winners = combined.winners
    except (ValueError, np.linalg.LinAlgError) as exc:
        y_hat_resid = float(targets.mean()) if targets.size else 0.0
        winners = ()
        diagnostic = f"fallback to window mean: {exc}"

    record = ForecastRecord(
        t=t, y_hat=y_hat_resid + y_ts_t, y_hat_residual=y_hat_resid,
        y_ts=y_ts_t, y_true=float(y_true), winners=winners, diagnostic=diagnostic,
    )

    # observe the realized value
    resid_true = float(y_true) - y_ts_t
    if forecasts is not None:
        _update_ledger(state, forecasts, resid_true, float(y_true), y_ts_t)
    state.arima_filter.observe(float(y_true))
    state.embedded.append(query)
    state.resid.append(resid_true)
    state.x_std.append(x_std)
    if state.embedding is not None:
        state.embedding = embed.online_update(state.embedding, x_std)
    state.t = t + 1

    if (t + 1) % cfg.ols_refit_period == 0:
        _periodic_refit(state)
    if cfg.weights_refresh_period and (t + 1) % cfg.weights_refresh_period == 0:
        _refresh_weights(state)
    return record


def _periodic_refit(state: PipelineState) -> None:
    cfg = state.config
    lo = max(0, state.t - cfg.lookback)
    raw = state.x_std.window(lo, state.t)
    targets = state.resid.window(lo, state.t)[:, 0]
    # regression design: the trailing window re-projected under the current
    # basis (one consistent frame), plus the augmented originals
    if state.embedding is not None:
        design = embed.project(state.embedding, raw)
        if state.augmented:
            design = np.hstack([design, raw[:, list(state.augmented)]])
    else:
        design = raw
    if design.shape[0] > design.shape[1] + 1:
        model = ols_fit(design, targets, warn=False)
        state.ols = _fold_ols(model, state.embedding, state.augmented, raw.shape[1])
    if cfg.refit_scale and state.x_std.n > 2:
        # experimental knob: re-normalize future standardized inputs by the
        # trailing dispersion; the tracked spectrum keeps its old scaling,
        # which is the documented price of re-scaling online at all
        spread = raw.std(axis=0, ddof=1)
        if np.all(spread > 0):
            state.std_scale = state.std_scale * spread


def _refresh_weights(state: PipelineState) -> None:
    cfg = state.config
    lo = max(0, state.t - cfg.lookback)
    rows = state.embedded.window(lo, state.t)
    targets = state.resid.window(lo, state.t)[:, 0]
    fresh = compute_feature_weights(
        rows, targets, rows.shape[0], cfg.c_min, cfg.use_ft, cfg.bernstein_k
    )
    if not fresh.is_zero:
        state.weights = fresh


def run(X, y, config: OfterConfig):
    """Initialize on the prefix, then roll forecasts over the remainder.

    Returns (records, final_state); records cover indices L0 .. N-1.
    """
    y = np.asarray(y, dtype=float)
    state = initialize(X, y, config)
    values = X.values if isinstance(X, TimePanel) else np.asarray(X, dtype=float)
    records = []
    for t in range(state.l0, y.size):
        records.append(advance(state, values[t], y[t]))
    return records, state


def forecasts_from_records(records) -> np.ndarray:
    return np.array([r.y_hat for r in records])


def targets_from_records(records) -> np.ndarray:
    return np.array([r.y_true for r in records])


def winners_label(winners: tuple) -> str:
    parts = []
    for family, param in winners:
        parts.append(family if param is None else f"{family}:{param:g}")
    return "|".join(parts)


def state_to_json(state: PipelineState) -> str:
    payload = {
        "schema_version": SNAPSHOT_SCHEMA_VERSION,
        "config": state.config.to_dict(),
        "active": state.active.tolist(),
        "std_mean": state.std_mean.tolist(),
        "std_scale": state.std_scale.tolist(),
        "labels": list(state.labels),
        "embedding": (embed.state_to_json(state.embedding)
                      if state.embedding is not None else None),
        "augmented": list(state.augmented),
        "weights": state.weights.v.tolist(),
        "weights_degenerate": state.weights_degenerate,
        "ledger": {
            "grnn": {str(k): v for k, v in state.ledger.grnn_losses.items()},
            "knn": {str(k): v for k, v in state.ledger.knn_losses.items()},
            "ols": state.ledger.ols_loss,
            "loss_kind": state.ledger.loss_kind,
        },
        "ols": {"beta0": state.ols.beta0, "beta": state.ols.beta.tolist()},
        "arima": {
            "p": state.arima_spec.p, "r": state.arima_spec.r, "q": state.arima_spec.q,
            "ar": state.arima_spec.ar_coeffs.tolist(),
            "ma": state.arima_spec.ma_coeffs.tolist(),
            "intercept": state.arima_spec.intercept,
        },
        "embedded": state.embedded.matrix().tolist(),
        "resid": state.resid.matrix()[:, 0].tolist(),
        "x_std": state.x_std.matrix().tolist(),
        "t": state.t,
        "l0": state.l0,
    }
    return json.dumps(payload)


def state_from_json(text: str) -> PipelineState:
    payload = json.loads(text)
    if payload.get("schema_version") != SNAPSHOT_SCHEMA_VERSION:
        raise ValueError(f"unsupported snapshot version: {payload.get('schema_version')}")
    config = OfterConfig.from_dict(payload["config"])
    ledger = ModelLedger(
        grnn_losses={float(k): v for k, v in payload["ledger"]["grnn"].items()},
        knn_losses={int(k): v for k, v in payload["ledger"]["knn"].items()},
        ols_loss=payload["ledger"]["ols"],
        loss_kind=payload["ledger"]["loss_kind"],
    )
    spec = arima.ArimaSpec(
        payload["arima"]["p"], payload["arima"]["r"], payload["arima"]["q"],
        np.array(payload["arima"]["ar"]), np.array(payload["arima"]["ma"]),
        payload["arima"]["intercept"],
    )
    embedded = np.array(payload["embedded"], dtype=float)
    resid = np.array(payload["resid"], dtype=float)
    state = PipelineState(
        config=config,
        active=np.array(payload["active"], dtype=bool),
        std_mean=np.array(payload["std_mean"], dtype=float),
        std_scale=np.array(payload["std_scale"], dtype=float),
        labels=tuple(payload["labels"]),
        embedding=(embed.state_from_json(payload["embedding"])
                   if payload["embedding"] is not None else None),
        augmented=tuple(payload["augmented"]),
        weights=FeatureWeights(np.array(payload["weights"], dtype=float)),
        weights_degenerate=payload["weights_degenerate"],
        ledger=ledger,
        ols=OlsModel(payload["ols"]["beta0"], np.array(payload["ols"]["beta"])),
        arima_spec=spec,
        arima_filter=arima.ArimaFilter(spec),
        embedded=_RowBuffer.from_matrix(embedded),
        resid=_RowBuffer.from_matrix(resid[:, None]),
        t=int(payload["t"]),
        l0=int(payload["l0"]),
    )
    return state


class OfterForecaster(BaseEstimator):
    """Scikit-learn style front end for the pipeline.

    ``fit(X, y)`` consumes the full aligned arrays: components are fitted
    on the leading ``l0_fraction`` of rows and forecasts are rolled over
    the remainder, available afterwards as ``forecasts_`` / ``records_``.
    Feature rows are used as given; lag construction is up to the caller
    (see :func:`ofter.frame.build_lagged_features`).
    """

    def __init__(self, use_dr=True, use_ft=True, delta=0.9, l0_fraction=0.7,
                 lookback=800, c_min=0.05, c_original=0.05, s_set=DEFAULT_S_SET,
                 k_set=DEFAULT_K_SET, p_adf=0.05, loss_kind="mse",
                 ols_refit_period=100, bernstein_k=4, seed=0,
                 average_candidates=False, weights_refresh_period=None,
                 refit_scale=False, tail_buffer=None):
        self.use_dr = use_dr
        self.use_ft = use_ft
        self.delta = delta
        self.l0_fraction = l0_fraction
        self.lookback = lookback
        self.c_min = c_min
        self.c_original = c_original
        self.s_set = s_set
        self.k_set = k_set
        self.p_adf = p_adf
        self.loss_kind = loss_kind
        self.ols_refit_period = ols_refit_period
        self.bernstein_k = bernstein_k
        self.seed = seed
        self.average_candidates = average_candidates
        self.weights_refresh_period = weights_refresh_period
        self.refit_scale = refit_scale
        self.tail_buffer = tail_buffer

    def config(self) -> OfterConfig:
        return OfterConfig(**self.get_params())

    def fit(self, X, y):
        records, state = run(X, y, self.config())
        self.records_ = records
        self.state_ = state
        self.forecasts_ = forecasts_from_records(records)
        self.targets_ = targets_from_records(records)
        return self

    def predict(self):
        """Out-of-sample forecasts produced during fit, in time order."""
        if not hasattr(self, "forecasts_"):
            raise RuntimeError("OfterForecaster instance is not fitted yet")
        return self.forecasts_

    def score(self, X=None, y=None):
        """Correlation between online forecasts and realized targets."""
        from ofter.metrics import forecast_quality

        pearson, _, _ = forecast_quality(self.forecasts_, self.targets_)
        return pearson


def align_next_step(panel: TimePanel, target_column: str, max_lag: int):
    """Build lagged features and pair each row with the next target value.

    Row i of the returned matrix holds lags 0..max_lag as of one time
    point; y[i] is the target column's value one step later.  The final
    lagged row has no successor and is dropped.
    """
    if target_column not in panel.columns:
        raise ValueError(f"target column {target_column!r} not in panel")
    lagged = frame.build_lagged_features(panel, max_lag)
    target = panel.column(target_column)
    y = target[max_lag + 1 :]
    X = TimePanel(lagged.values[:-1], lagged.columns, lagged.index[:-1])
    return X, y
