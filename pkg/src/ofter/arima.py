"""Stationarity testing, order search, and target decomposition.

The target series is split into a linear time-series component and a
residual before any regression happens: a unit-root test decides how often
to difference, autocorrelation diagnostics decide whether AR/MA terms are
worth fitting at all, and a two-stage least-squares scheme (long
autoregression for residual proxies, then a joint regression on lagged
values and lagged proxies) scores every order pair on AIC.  Estimation is
deliberately regression-based rather than likelihood-based: it is
deterministic, fast enough to sit inside a pipeline initialization, and
accurate enough for order selection.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

# Unit-root p-value surface (constant-only case, one variable): below
# tau_min the p-value saturates at 0, above tau_max at 1; otherwise a cubic
# in the statistic feeds the normal CDF, with separate small-p and large-p
# polynomials switching at tau_star.  Constants are MacKinnon's published
# response-surface estimates.
_TAU_STAR = -1.61
_TAU_MIN = -18.83
_TAU_MAX = 2.74
_SMALL_P = (2.1659, 1.4412, 0.038269)
_LARGE_P = (1.7339, 0.93202, -0.12745, -0.010368)

MAX_DIFFERENCES = 2


def _norm_cdf(x: float) -> float:
    from math import erf, sqrt

    return 0.5 * (1.0 + erf(x / sqrt(2.0)))


def _unit_root_pvalue(stat: float) -> float:
    if stat <= _TAU_MIN:
        return 0.0
    if stat >= _TAU_MAX:
        return 1.0
    if stat <= _TAU_STAR:
        poly = _SMALL_P
    else:
        poly = _LARGE_P
    arg = sum(c * stat ** i for i, c in enumerate(poly))
    return _norm_cdf(arg)


def _lagged_design(y: np.ndarray, lags: int):
    """Rows [y_{t-1}, ..., y_{t-lags}] aligned with y_t for t >= lags."""
    n = y.size
    cols = [y[lags - j - 1 : n - j - 1] for j in range(lags)]
    return np.column_stack(cols) if lags else np.empty((n, 0))


def adf_test(y, max_lag: int | None = None):
    """Augmented Dickey-Fuller regression with intercept.

    Returns (statistic, p_value).  The number of difference lags defaults
    to the Schwert rule floor(12 * (T/100)^0.25).
    """
    y = np.asarray(y, dtype=float)
    if y.size < 20:
        raise ValueError("series too short for a unit-root test (need >= 20)")
    if np.ptp(y) == 0.0:
        raise ValueError("constant series")
    n = y.size
    if max_lag is None:
        max_lag = int(np.floor(12.0 * (n / 100.0) ** 0.25))
    max_lag = min(max_lag, (n - 10) // 2)
    dy = np.diff(y)
    # regress dy_t on [1, y_{t-1}, dy_{t-1}, ..., dy_{t-max_lag}]
    t0 = max_lag
    rhs = [np.ones(dy.size - t0), y[t0:-1]]
    for j in range(1, max_lag + 1):
        rhs.append(dy[t0 - j : dy.size - j])
    X = np.column_stack(rhs)
    target = dy[t0:]
    coef, _, _, _ = np.linalg.lstsq(X, target, rcond=None)
    resid = target - X @ coef
    dof = target.size - X.shape[1]
    if dof <= 0:
        raise ValueError("series too short for the requested lag order")
    sigma2 = float(resid @ resid) / dof
    cov = sigma2 * np.linalg.inv(X.T @ X)
    stat = float(coef[1] / np.sqrt(cov[1, 1]))
    return stat, _unit_root_pvalue(stat)


def difference_until_stationary(y, p_adf: float):
    """Difference (at most twice) until the unit-root null is rejected.

    Returns (series, r).  If the null still stands at the differencing cap
    a warning is issued and the capped result is returned.
    """
    if not 0.0 < p_adf < 1.0:
        raise ValueError("p_adf must lie in (0, 1)")
    w = np.asarray(y, dtype=float)
    for r in range(MAX_DIFFERENCES + 1):
        _, pval = adf_test(w)
        if pval < p_adf:
            return w, r
        if r < MAX_DIFFERENCES:
            w = np.diff(w)
    warnings.warn(
        f"series still non-stationary after {MAX_DIFFERENCES} differences",
        RuntimeWarning,
        stacklevel=2,
    )
    return w, MAX_DIFFERENCES


def acf_pacf(y, max_lag: int, significance: float = 0.001):
    """Sample autocorrelations, partial autocorrelations, and band flags.

    PACF comes from the Durbin-Levinson recursion on the ACF.  A lag is
    flagged significant when either function leaves the +-z/sqrt(T) band.
    Lag 0 entries are 1 by convention and never flagged.
    """
    y = np.asarray(y, dtype=float)
    n = y.size
    if n <= 3 * max_lag:
        raise ValueError("series too short: need length > 3 * max_lag")
    yc = y - y.mean()
    denom = float(yc @ yc)
    if denom == 0.0:
        raise ValueError("constant series")
    acf = np.empty(max_lag + 1)
    acf[0] = 1.0
    for k in range(1, max_lag + 1):
        acf[k] = float(yc[k:] @ yc[:-k]) / denom

    pacf = np.empty(max_lag + 1)
    pacf[0] = 1.0
    phi_prev = np.zeros(0)
    for k in range(1, max_lag + 1):
        if k == 1:
            phi_k = np.array([acf[1]])
        else:
            num = acf[k] - float(phi_prev @ acf[k - 1 : 0 : -1])
            den = 1.0 - float(phi_prev @ acf[1:k])
            alpha = num / den if den != 0.0 else 0.0
            phi_k = np.append(phi_prev - alpha * phi_prev[::-1], alpha)
        pacf[k] = phi_k[-1]
        phi_prev = phi_k

    from math import sqrt
    z = _norm_ppf(1.0 - significance / 2.0)
    band = z / sqrt(n)
    significant = np.zeros(max_lag + 1, dtype=bool)
    significant[1:] = (np.abs(acf[1:]) > band) | (np.abs(pacf[1:]) > band)
    return acf, pacf, significant


def _norm_ppf(q: float) -> float:
    """Standard normal quantile by bisection on the CDF (no scipy needed)."""
    lo, hi = -10.0, 10.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _norm_cdf(mid) < q:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class ArimaSpec:
    """Selected orders and fitted coefficients for the target decomposition."""

    p: int
    r: int
    q: int
    ar_coeffs: np.ndarray
    ma_coeffs: np.ndarray
    intercept: float

    def __post_init__(self):
        ar = np.asarray(self.ar_coeffs, dtype=float)
        ma = np.asarray(self.ma_coeffs, dtype=float)
        if ar.size != self.p or ma.size != self.q:
            raise ValueError("coefficient lengths disagree with the orders")
        if min(self.p, self.q, self.r) < 0:
            raise ValueError("orders must be non-negative")
        if self.p and _min_ar_root_modulus(ar) <= 1.0 - 1e-8:
            raise ValueError("fitted AR polynomial has a root inside the unit circle")
        object.__setattr__(self, "ar_coeffs", ar)
        object.__setattr__(self, "ma_coeffs", ma)

    @property
    def is_null(self) -> bool:
        return self.p == 0 and self.r == 0 and self.q == 0


def _min_ar_root_modulus(ar: np.ndarray) -> float:
    # roots of 1 - phi_1 x - ... - phi_p x^p
    coeffs = np.concatenate([[-c for c in ar[::-1]], [1.0]])
    roots = np.roots(coeffs)
    return float(np.min(np.abs(roots))) if roots.size else np.inf


@dataclass(frozen=True)
class Decomposition:
    """Additive split y = y_ts + residual (exact, by construction)."""

    y_ts: np.ndarray
    residual: np.ndarray


def _hannan_rissanen(w: np.ndarray, max_p: int, max_q: int):
    """Order search by two-stage regression; returns the best ArimaSpec pieces.

    Stage one fits a long autoregression to proxy the innovations; stage
    two regresses on lagged values and lagged proxies for every (p, q) on
    the grid, scoring by AIC over a common sample.  Cells whose AR part is
    non-stationary are skipped; ties break toward fewer parameters, then
    smaller p.
    """
    n = w.size
    m = min(n // 4, max(8, 2 * (max_p + max_q)))
    X1 = np.column_stack([np.ones(n - m), _lagged_design(w, m)])
    target1 = w[m:]
    coef1, _, _, _ = np.linalg.lstsq(X1, target1, rcond=None)
    ehat = np.concatenate([np.zeros(m), target1 - X1 @ coef1])

    start = m + max(max_p, max_q)
    n_eff = n - start
    best = None
    for p in range(max_p + 1):
        for q in range(max_q + 1):
            cols = [np.ones(n_eff)]
            for j in range(1, p + 1):
                cols.append(w[start - j : n - j])
            for j in range(1, q + 1):
                cols.append(ehat[start - j : n - j])
            X = np.column_stack(cols)
            coef, _, _, _ = np.linalg.lstsq(X, w[start:], rcond=None)
            resid = w[start:] - X @ coef
            sigma2 = float(resid @ resid) / n_eff
            if sigma2 <= 0:
                continue
            ar = coef[1 : 1 + p]
            if p and _min_ar_root_modulus(ar) <= 1.0 + 1e-6:
                continue
            aic = n_eff * np.log(sigma2) + 2.0 * (p + q + 1)
            key = (aic, p + q, p)
            if best is None or key < best[0]:
                best = (key, p, q, float(coef[0]), ar, coef[1 + p :])
    if best is None:
        return 0, 0, float(w.mean()), np.zeros(0), np.zeros(0)
    _, p, q, c, ar, ma = best
    return p, q, c, ar, ma


def one_step_predictions(spec: ArimaSpec, y) -> np.ndarray:
    """In-sample one-step-ahead predictions of y under frozen coefficients.

    Each prediction uses observed values strictly before its time point
    (differenced-scale recursion re-integrated to the original scale), so
    the output is causal; entries whose lags are unavailable are zero.
    """
    y = np.asarray(y, dtype=float)
    if spec.is_null:
        return np.zeros_like(y)
    r = spec.r
    w = np.diff(y, n=r) if r else y.copy()
    nw = w.size
    warmup = max(spec.p, spec.q)
    what = np.zeros(nw)
    ehat = np.zeros(nw)
    for t in range(nw):
        if t >= warmup:
            pred = spec.intercept
            for j in range(1, spec.p + 1):
                pred += spec.ar_coeffs[j - 1] * w[t - j]
            for j in range(1, spec.q + 1):
                pred += spec.ma_coeffs[j - 1] * ehat[t - j]
            what[t] = pred
        ehat[t] = w[t] - what[t]

    y_ts = np.zeros_like(y)
    if r == 0:
        y_ts[:] = what
    elif r == 1:
        # w[t-1] predicts y[t] - y[t-1]
        y_ts[1:] = y[:-1] + what
    else:  # r == 2
        y_ts[2:] = 2.0 * y[1:-1] - y[:-2] + what
    return y_ts


def decompose_with(spec: ArimaSpec, y) -> Decomposition:
    """Apply a fitted spec to a series; residual = y - y_ts exactly."""
    y = np.asarray(y, dtype=float)
    y_ts = one_step_predictions(spec, y)
    return Decomposition(y_ts=y_ts, residual=y - y_ts)


class ArimaFilter:
    """Incremental one-step predictions under a frozen spec.

    Feeding the observed series through ``observe`` and reading
    ``predict_next`` before each observation reproduces exactly the output
    of :func:`one_step_predictions`, one value at a time, in O(p + q) per
    step.
    """

    def __init__(self, spec: ArimaSpec):
        self.spec = spec
        self._raw: list[float] = []  # last r observed values
        self._w: list[float] = []  # last max(p, 1) differenced values
        self._ehat: list[float] = []  # last max(q, 1) innovation proxies
        self._n_w = 0  # differenced values seen so far

    def _predict_w(self) -> float:
        spec = self.spec
        if self._n_w < max(spec.p, spec.q):
            return 0.0
        pred = spec.intercept
        for j in range(1, spec.p + 1):
            pred += spec.ar_coeffs[j - 1] * self._w[-j]
        for j in range(1, spec.q + 1):
            pred += spec.ma_coeffs[j - 1] * self._ehat[-j]
        return pred

    def predict_next(self) -> float:
        """Prediction of the next value of y given everything observed."""
        spec = self.spec
        if spec.is_null:
            return 0.0
        r = spec.r
        if len(self._raw) < r:
            return 0.0
        what = self._predict_w()
        if r == 0:
            return what
        if r == 1:
            return self._raw[-1] + what
        return 2.0 * self._raw[-1] - self._raw[-2] + what

    def observe(self, y_t: float) -> None:
        spec = self.spec
        if spec.is_null:
            return
        r = spec.r
        if len(self._raw) >= r:
            if r == 0:
                w_new = y_t
            elif r == 1:
                w_new = y_t - self._raw[-1]
            else:
                w_new = y_t - 2.0 * self._raw[-1] + self._raw[-2]
            ehat_new = w_new - self._predict_w()
            self._w.append(w_new)
            self._ehat.append(ehat_new)
            self._n_w += 1
            keep = max(spec.p, spec.q, 1)
            del self._w[:-keep]
            del self._ehat[:-keep]
        if r:
            self._raw.append(y_t)
            del self._raw[:-r]


def select_and_decompose(y, p_adf: float = 0.05, max_p: int = 3, max_q: int = 3,
                         significance: float = 0.001):
    """Choose differencing and ARMA orders on y, then decompose it.

    With no significant autocorrelation the spec collapses to orders
    (0, r, 0); the all-zero spec yields an identically zero time-series
    component.  For out-of-sample use, fit on a training prefix and apply
    ``decompose_with`` to the full series.
    """
    y = np.asarray(y, dtype=float)
    if y.size < 50:
        raise ValueError("series too short for order selection (need >= 50)")
    w, r = difference_until_stationary(y, p_adf)

    scan = max(max_p, max_q)
    _, _, flags = acf_pacf(w, scan, significance)
    if not flags[1:].any():
        if r == 0:
            spec = ArimaSpec(0, 0, 0, np.zeros(0), np.zeros(0), 0.0)
        else:
            spec = ArimaSpec(0, r, 0, np.zeros(0), np.zeros(0), float(w.mean()))
        return spec, decompose_with(spec, y)

    p, q, c, ar, ma = _hannan_rissanen(w, max_p, max_q)
    if p == 0 and q == 0 and r == 0:
        spec = ArimaSpec(0, 0, 0, np.zeros(0), np.zeros(0), 0.0)
    else:
        spec = ArimaSpec(p, r, q, ar, ma, c)
    return spec, decompose_with(spec, y)
