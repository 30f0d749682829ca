"""Cumulative-loss tracking and winner-take-all combination of candidates.

Every bandwidth in the kernel grid, every neighbor count in the kNN grid,
and the linear model each run as an independent candidate; the forecast
routed to the user is the equal-weighted mean of whichever candidates
currently share the minimum cumulative loss (usually a single winner).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ofter.regress import (
    OlsModel,
    grnn_from_distances,
    knn_from_distances,
    ols_predict,
    weighted_distances,
)

LOSS_KINDS = ("mse", "mae", "neg_pnl")

GRNN = "grnn"
KNN = "knn"
OLS = "ols"


def candidate_labels(s_set, k_set):
    labels = [(GRNN, float(s)) for s in s_set]
    labels += [(KNN, int(k)) for k in k_set]
    labels.append((OLS, None))
    return tuple(labels)


@dataclass(frozen=True)
class ModelLedger:
    """Cumulative losses per candidate.

    For squared/absolute-error losses the entries are non-decreasing over
    time; the trading loss (minus profit) can decrease.
    """

    grnn_losses: dict
    knn_losses: dict
    ols_loss: float
    loss_kind: str

    def __post_init__(self):
        if self.loss_kind not in LOSS_KINDS:
            raise ValueError(f"loss_kind must be one of {LOSS_KINDS}")

    @classmethod
    def fresh(cls, s_set, k_set, loss_kind: str = "mse") -> "ModelLedger":
        return cls(
            grnn_losses={float(s): 0.0 for s in s_set},
            knn_losses={int(k): 0.0 for k in k_set},
            ols_loss=0.0,
            loss_kind=loss_kind,
        )

    @property
    def s_set(self):
        return tuple(self.grnn_losses)

    @property
    def k_set(self):
        return tuple(self.knn_losses)

    def loss_of(self, label) -> float:
        family, param = label
        if family == GRNN:
            return self.grnn_losses[param]
        if family == KNN:
            return self.knn_losses[param]
        return self.ols_loss

    def labels(self):
        return candidate_labels(self.s_set, self.k_set)


@dataclass(frozen=True)
class CombinedForecast:
    value: float
    eta: dict
    winners: tuple


def _loss_increment(kind: str, forecast: float, y_true: float, actual_return) -> float:
    if kind == "mse":
        return (forecast - y_true) ** 2
    if kind == "mae":
        return abs(forecast - y_true)
    if actual_return is None:
        raise ValueError("neg_pnl loss requires the realized return")
    return -float(np.sign(forecast)) * actual_return


def combine(ledger: ModelLedger, forecasts: dict) -> CombinedForecast:
    """Route to the minimum-loss candidates, splitting ties equally.

    ``forecasts`` maps candidate labels (as produced by the ledger) to
    values and must cover exactly the ledger's candidate set.  Ties are
    detected by exact equality of accumulated losses: fuzzy tie detection
    would break determinism.
    """
    labels = ledger.labels()
    if set(forecasts) != set(labels):
        raise ValueError("forecasts do not match the ledger's candidate set")
    if not labels:
        raise ValueError("empty candidate set")
    losses = np.array([ledger.loss_of(lab) for lab in labels])
    best = losses.min()
    winner_mask = losses == best
    n_opt = int(winner_mask.sum())
    eta = {lab: (1.0 / n_opt if win else 0.0) for lab, win in zip(labels, winner_mask)}
    value = float(sum(eta[lab] * forecasts[lab] for lab in labels))
    winners = tuple(lab for lab, win in zip(labels, winner_mask) if win)
    return CombinedForecast(value=value, eta=eta, winners=winners)


def combine_averaged(ledger: ModelLedger, forecasts: dict) -> CombinedForecast:
    """Loss-weighted averaging over all candidates (config alternative).

    Weights decay with the candidate's excess loss over the current best;
    the winner-take-all rule is the default because averaging measured
    worse, but the hook is kept for experimentation.
    """
    labels = ledger.labels()
    losses = np.array([ledger.loss_of(lab) for lab in labels])
    raw = 1.0 / (1.0 + losses - losses.min())
    raw /= raw.sum()
    eta = {lab: float(w) for lab, w in zip(labels, raw)}
    value = float(sum(eta[lab] * forecasts[lab] for lab in labels))
    best = losses.min()
    winners = tuple(lab for lab, ls in zip(labels, losses) if ls == best)
    return CombinedForecast(value=value, eta=eta, winners=winners)


def update_losses(ledger: ModelLedger, forecasts: dict, y_true: float,
                  actual_return=None) -> ModelLedger:
    """Accumulate one step of loss for every candidate."""
    if not np.isfinite(y_true):
        raise ValueError("y_true must be finite")
    grnn = {
        s: loss + _loss_increment(ledger.loss_kind, forecasts[(GRNN, s)], y_true, actual_return)
        for s, loss in ledger.grnn_losses.items()
    }
    knn = {
        k: loss + _loss_increment(ledger.loss_kind, forecasts[(KNN, k)], y_true, actual_return)
        for k, loss in ledger.knn_losses.items()
    }
    ols = ledger.ols_loss + _loss_increment(
        ledger.loss_kind, forecasts[(OLS, None)], y_true, actual_return
    )
    return replace(ledger, grnn_losses=grnn, knn_losses=knn, ols_loss=ols)


def candidate_forecasts(window, targets, query, ledger: ModelLedger,
                        weights, ols: OlsModel, ols_value: float | None = None) -> dict:
    """All candidate forecasts for one time point, sharing one distance pass.

    ``ols_value`` lets a caller supply the linear model's prediction when it
    is computed in a different coordinate frame than the neighbor query.
    """
    window = np.asarray(window, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if window.shape[0] != targets.shape[0]:
        raise ValueError("window and targets disagree in length")
    k_max = max(ledger.k_set)
    if window.shape[0] < k_max:
        raise ValueError(f"window shorter than the largest neighbor count ({k_max})")
    d = weighted_distances(window, query, weights)
    out = {}
    for s in ledger.s_set:
        out[(GRNN, s)] = grnn_from_distances(d, targets, s)
    order = np.argsort(d, kind="stable")  # one sort shared by every k
    for k in ledger.k_set:
        out[(KNN, k)] = float(np.mean(targets[order[:k]]))
    out[(OLS, None)] = ols_predict(ols, query) if ols_value is None else float(ols_value)
    return out


def step(window, targets, query, ledger: ModelLedger, weights, ols: OlsModel,
         averaged: bool = False, ols_value: float | None = None):
    """One forecasting step: distances once, every candidate, then combine."""
    forecasts = candidate_forecasts(window, targets, query, ledger, weights, ols,
                                    ols_value=ols_value)
    rule = combine_averaged if averaged else combine
    return rule(ledger, forecasts), forecasts
