"""Forecast-quality and trading-strategy evaluation.

P&L follows the sign-of-forecast convention: each day contributes the
cross-sectional mean of sign(signal) times excess return over the chosen
magnitude quantile.  The Sharpe significance test adjusts a one-tailed
normal statistic for sample skewness and kurtosis; the exact published
test is proprietary to its authors' description, so the output labels the
p-value as an approximation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import erf, sqrt

import numpy as np

TRADING_DAYS = 252
P_VALUE_METHOD = "skew-kurtosis-adjusted normal approximation"


def close_to_close_returns(prices, k: int = 1) -> np.ndarray:
    """(P_{t+k} - P_t) / P_t, aligned at t; length shrinks by k."""
    p = np.asarray(prices, dtype=float)
    if np.any(p <= 0):
        raise ValueError("prices must be strictly positive")
    if not 1 <= k < p.size:
        raise ValueError("horizon k out of range")
    return (p[k:] - p[:-k]) / p[:-k]


def excess_returns(returns, benchmark) -> np.ndarray:
    r = np.asarray(returns, dtype=float)
    b = np.asarray(benchmark, dtype=float)
    if r.shape != b.shape:
        raise ValueError("misaligned series")
    return r - b


def log_volume_returns(volumes, k: int = 1) -> np.ndarray:
    """(log V_{t+k} - log V_t) / log V_t, aligned at t."""
    v = np.asarray(volumes, dtype=float)
    if np.any(v <= 0):
        raise ValueError("volumes must be strictly positive")
    if not 1 <= k < v.size:
        raise ValueError("horizon k out of range")
    lv = np.log(v)
    if np.any(lv == 0):
        raise ValueError("volume of exactly 1 makes the denominator vanish")
    return (lv[k:] - lv[:-k]) / lv[:-k]


@dataclass(frozen=True)
class StrategyResult:
    pnl: np.ndarray
    sr: float
    ppd: float
    p_value: float
    quantile: int
    empty_days: tuple = ()
    p_value_method: str = P_VALUE_METHOD

    def to_dict(self) -> dict:
        return {
            "quantile": self.quantile,
            "sr": self.sr,
            "ppd": self.ppd,
            "p_value": self.p_value,
            "p_value_method": self.p_value_method,
            "n_days": int(self.pnl.size),
            "n_empty_days": len(self.empty_days),
        }


def _norm_cdf(x: float) -> float:
    return 0.5 * (1.0 + erf(x / sqrt(2.0)))


def sharpe_significance(pnl: np.ndarray) -> float:
    """One-tailed p-value for SR > 0, adjusted for skewness and kurtosis."""
    n = pnl.size
    if n < 3:
        return float("nan")
    sd = pnl.std(ddof=1)
    if sd == 0:
        return float("nan")
    sr_daily = pnl.mean() / sd
    z = (pnl - pnl.mean()) / sd
    skew = float(np.mean(z ** 3))
    kurt = float(np.mean(z ** 4))
    denom = 1.0 - skew * sr_daily + (kurt - 1.0) / 4.0 * sr_daily ** 2
    denom = max(denom, 1e-12)
    stat = sr_daily * sqrt(n - 1.0) / sqrt(denom)
    return 1.0 - _norm_cdf(stat)


def quantile_members(signals_day: np.ndarray, quantile: int) -> np.ndarray:
    """Indices in the day's top (6-q)/5 share of |signal|, ties by index."""
    if not 1 <= quantile <= 5:
        raise ValueError("quantile must be 1..5")
    n = signals_day.size
    m = int(np.ceil((6 - quantile) / 5.0 * n))
    order = np.lexsort((np.arange(n), -np.abs(signals_day)))
    return np.sort(order[:m])


def evaluate_strategy(signals, returns, quantile: int = 1) -> StrategyResult:
    """Sign-trading P&L of a signal matrix against aligned excess returns.

    ``signals`` and ``returns`` are instruments x days.  Per day, the
    top-magnitude quantile subset is selected, zero signals take no
    position, and the divisor is the number of positioned names.  Days
    left with no position contribute zero P&L and are flagged.
    """
    S = np.atleast_2d(np.asarray(signals, dtype=float))
    R = np.atleast_2d(np.asarray(returns, dtype=float))
    if S.shape != R.shape:
        raise ValueError("signals and returns must share a shape")
    n_days = S.shape[1]
    pnl = np.zeros(n_days)
    empty = []
    for t in range(n_days):
        members = quantile_members(S[:, t], quantile)
        signs = np.sign(S[members, t])
        active = signs != 0
        if not active.any():
            empty.append(t)
            continue
        pnl[t] = float(signs[active] @ R[members[active], t]) / int(active.sum())
    sd = pnl.std(ddof=1) if n_days > 1 else 0.0
    sr = float(pnl.mean() * sqrt(TRADING_DAYS) / sd) if sd > 0 else 0.0
    return StrategyResult(
        pnl=pnl,
        sr=sr,
        ppd=float(pnl.mean()),
        p_value=sharpe_significance(pnl),
        quantile=quantile,
        empty_days=tuple(empty),
    )


def forecast_quality(y_hat, y):
    """(pearson correlation, mse, mae); errors out on a constant target."""
    y_hat = np.asarray(y_hat, dtype=float)
    y = np.asarray(y, dtype=float)
    if y_hat.shape != y.shape or y.ndim != 1 or y.size < 2:
        raise ValueError("need two aligned vectors of length >= 2")
    if np.ptp(y) == 0.0:
        raise ValueError("correlation undefined for a constant target")
    err = y_hat - y
    mse = float(np.mean(err ** 2))
    mae = float(np.mean(np.abs(err)))
    a = y_hat - y_hat.mean()
    b = y - y.mean()
    denom = np.sqrt((a @ a) * (b @ b))
    pearson = float(a @ b / denom) if denom > 0 else 0.0
    return pearson, mse, mae


def summary_json(result_by_quantile: dict, extra: dict | None = None) -> str:
    payload = {"strategy": {f"Q{q}": r.to_dict() for q, r in sorted(result_by_quantile.items())}}
    if extra:
        payload.update(extra)
    return json.dumps(payload, indent=2)
