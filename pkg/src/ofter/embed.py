"""Streaming PCA: batch fit, projection, and exact-mean online updates.

Each new observation updates the retained spectrum through three rank-one
perturbations of the scatter matrix: one for the new (previous-mean
centered) point and two that re-center everything onto the new mean.  By
default every eigenpair is carried, so the online state matches a batch
refit to solver precision.  For wide panels the ``tail_buffer`` knob
truncates the working spectrum to the projection dimension plus a few
guard directions, collapsing the remainder into a single variance scalar;
updates then cost O(p^2 d) instead of O(d^3) at the price of a small,
slowly accumulating approximation error at the truncation boundary.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ofter import spectra
from ofter.frame import TimePanel
from ofter.spectra import EigenSystem, RankOneUpdate

SNAPSHOT_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class EmbeddingState:
    """Running PCA state: working spectrum, mean, scale, and bookkeeping.

    ``spectrum`` holds sample-covariance eigenvalues with d x p_work
    eigenvector columns, of which the leading ``p`` define the projection.
    ``mean`` lives in scaled coordinates (input divided by ``scale``), so
    with a unit scale it is the plain running mean.  ``mu_tail``
    summarizes any eigenvalues beyond the working set; ``trace`` tracks
    the total covariance trace for variance accounting.
    """

    spectrum: EigenSystem
    mean: np.ndarray
    scale: np.ndarray
    p: int
    t: int
    delta: float
    mu_tail: float
    trace: float

    @property
    def dim(self) -> int:
        return self.spectrum.dim

    @property
    def p_work(self) -> int:
        return self.spectrum.eigenvalues.size

    @property
    def eigenvalues(self) -> np.ndarray:
        """Sample-covariance eigenvalues of the projection subspace."""
        return self.spectrum.eigenvalues[: self.p]

    @property
    def components(self) -> np.ndarray:
        """The d x p projection basis."""
        return self.spectrum.eigenvectors[:, : self.p]


def retained_dimension(eigenvalues: np.ndarray, delta: float) -> int:
    """Smallest p whose leading eigenvalues capture a delta share of variance."""
    lam = np.maximum(np.asarray(eigenvalues, dtype=float), 0.0)
    total = lam.sum()
    if total <= 0:
        raise ValueError("spectrum has no variance")
    frac = np.cumsum(lam) / total
    return int(np.searchsorted(frac, delta - 1e-12) + 1)


def fit_pca(panel, delta: float, scale=None, tail_buffer: int | None = None) -> EmbeddingState:
    """Fit the embedding on a (standardized) panel.

    The projection dimension is the smallest p capturing a ``delta``
    fraction of total variance; it stays fixed during online updates.
    ``tail_buffer=None`` keeps the whole spectrum in the working state
    (exact updates); an integer keeps only p + tail_buffer eigenpairs.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    X = panel.values if isinstance(panel, TimePanel) else np.asarray(panel, dtype=float)
    n, d = X.shape
    if n < d:
        raise ValueError(f"need at least {d} rows to fit a {d}-column embedding")
    scale = np.ones(d) if scale is None else np.asarray(scale, dtype=float)
    Xs = X / scale
    mean = Xs.mean(axis=0)
    Xc = Xs - mean
    cov = Xc.T @ Xc / (n - 1)
    sys = spectra.full_eig(cov)
    if sys.eigenvalues[-1] < -1e-10:
        raise ValueError("covariance is not positive semi-definite: rank-deficient input?")
    lam = sys.eigenvalues
    p = retained_dimension(lam, delta)
    if tail_buffer is None:
        p_work = d
    else:
        if tail_buffer < 0:
            raise ValueError("tail_buffer must be non-negative")
        p_work = min(d, p + tail_buffer)
    mu_tail = float(np.median(lam[p_work:])) if p_work < d else 0.0
    spectrum = EigenSystem(lam[:p_work], sys.eigenvectors[:, :p_work])
    return EmbeddingState(
        spectrum=spectrum,
        mean=mean,
        scale=scale,
        p=p,
        t=n,
        delta=delta,
        mu_tail=mu_tail,
        trace=float(lam.sum()),
    )


def project(state: EmbeddingState, x) -> np.ndarray:
    """Coordinates of x in the retained basis: U_p^T ((x - mean) / scale).

    Accepts a single d-vector or an (n, d) batch.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != state.dim:
        raise ValueError("dimension mismatch")
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite input")
    return (x / state.scale - state.mean) @ state.components


def _apply_scatter_update(U, lam_scatter, mu_scatter, rho, v, dim):
    """One rank-one scatter update in the working-plus-tail representation."""
    pw = lam_scatter.size
    z = U.T @ v
    r = v - U @ z
    z2 = U.T @ r  # one reorthogonalization pass
    r = r - U @ z2
    z = z + z2
    rn = float(np.linalg.norm(r))

    if pw == dim or rn <= 1e-12 * max(float(np.linalg.norm(v)), 1.0):
        # Update is confined to the working span.
        sys = EigenSystem(lam_scatter, np.eye(pw))
        out = spectra.rank_one_update(sys, RankOneUpdate(rho, z))
        return out.eigenvalues, U @ out.eigenvectors

    mu = min(mu_scatter, lam_scatter[-1] - 1e-12 * max(1.0, abs(lam_scatter[-1])))
    sys = EigenSystem(np.append(lam_scatter, mu), np.eye(pw + 1))
    out = spectra.rank_one_update(sys, RankOneUpdate(rho, np.append(z, rn)))
    W = np.hstack([U, (r / rn)[:, None]])
    return out.eigenvalues[:pw], W @ out.eigenvectors[:, :pw]


def online_update(state: EmbeddingState, x_new) -> EmbeddingState:
    """Absorb one observation: spectrum update, mean update, re-centering.

    The scatter matrix first gains the new point centered at the previous
    mean, then two further rank-one terms move the centering onto the
    updated mean; eigenvalues are re-expressed per sample-covariance
    normalization at the end.  A point equal to the current mean leaves
    the spectrum direction unchanged (only the normalization shifts).
    """
    x = np.asarray(x_new, dtype=float)
    if x.shape != (state.dim,):
        raise ValueError("observation has wrong dimension")
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite observation")
    t = state.t
    d = state.dim
    pw = state.p_work
    xs = x / state.scale
    xbar = xs - state.mean

    lam_s = state.spectrum.eigenvalues * (t - 1)
    mu_s = state.mu_tail * (t - 1)
    trace_s = state.trace * (t - 1)
    U = state.spectrum.eigenvectors

    def refresh_tail(lam_s, trace_s, mu_s):
        # The tail scalar is kept moment-consistent: total variance is
        # tracked exactly, so the leftover divided by the number of
        # collapsed directions is the tail's average eigenvalue.  (Carrying
        # the released secular root instead ratchets the scalar upward.)
        if pw == d:
            return mu_s
        spread = max(trace_s - float(lam_s.sum()), 0.0) / (d - pw)
        return min(spread, lam_s[-1])

    nx2 = float(xbar @ xbar)
    if nx2 > 0.0:
        lam_s, U = _apply_scatter_update(U, lam_s, mu_s, 1.0, xbar, d)
        trace_s += nx2
        mu_s = refresh_tail(lam_s, trace_s, mu_s)

    t_new = t + 1
    mean_new = state.mean + xbar / t_new
    a = state.mean - mean_new  # = -xbar / t_new
    na2 = float(a @ a)
    if na2 > 0.0:
        # Re-centering as two rank-one terms; their coefficients satisfy
        # rho1 + rho2 = t_new and rho1 * rho2 = -1.
        root = np.sqrt(t_new ** 2 + 4.0)
        rho1 = (t_new - root) / 2.0
        rho2 = (t_new + root) / 2.0
        for rho, b in ((rho1, (rho1 * a + xbar) / np.sqrt(1.0 + rho1 ** 2)),
                       (rho2, (rho2 * a + xbar) / np.sqrt(1.0 + rho2 ** 2))):
            lam_s, U = _apply_scatter_update(U, lam_s, mu_s, rho, b, d)
            trace_s += rho * float(b @ b)
            mu_s = refresh_tail(lam_s, trace_s, mu_s)

    spectrum = EigenSystem(np.maximum(lam_s, 0.0) / t, U)
    return replace(
        state,
        spectrum=spectrum,
        mean=mean_new,
        t=t_new,
        mu_tail=max(mu_s, 0.0) / t,
        trace=trace_s / t,
    )


def state_to_json(state: EmbeddingState) -> str:
    payload = {
        "schema_version": SNAPSHOT_SCHEMA_VERSION,
        "eigenvalues": state.spectrum.eigenvalues.tolist(),
        "components": state.spectrum.eigenvectors.tolist(),
        "mean": state.mean.tolist(),
        "scale": state.scale.tolist(),
        "p": state.p,
        "t": state.t,
        "delta": state.delta,
        "mu_tail": state.mu_tail,
        "trace": state.trace,
    }
    return json.dumps(payload)


def state_from_json(text: str) -> EmbeddingState:
    payload = json.loads(text)
    if payload.get("schema_version") != SNAPSHOT_SCHEMA_VERSION:
        raise ValueError(f"unsupported snapshot version: {payload.get('schema_version')}")
    spectrum = EigenSystem(
        np.array(payload["eigenvalues"], dtype=float),
        np.array(payload["components"], dtype=float),
    )
    return EmbeddingState(
        spectrum=spectrum,
        mean=np.array(payload["mean"], dtype=float),
        scale=np.array(payload["scale"], dtype=float),
        p=int(payload["p"]),
        t=int(payload["t"]),
        delta=float(payload["delta"]),
        mu_tail=float(payload["mu_tail"]),
        trace=float(payload["trace"]),
    )


class StreamingPCA(BaseEstimator, TransformerMixin):
    """Scikit-learn style wrapper around the online embedding.

    ``fit`` performs the batch decomposition, ``transform`` projects rows,
    and ``partial_fit`` folds new observations into the spectrum one at a
    time without refitting.
    """

    def __init__(self, delta: float = 0.9, tail_buffer: int | None = None):
        self.delta = delta
        self.tail_buffer = tail_buffer

    def fit(self, X, y=None):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2:
            raise ValueError("X must be 2-d")
        self.state_ = fit_pca(X, self.delta, tail_buffer=self.tail_buffer)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        self._check_fitted()
        return project(self.state_, np.asarray(X, dtype=float))

    def partial_fit(self, X, y=None):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if not hasattr(self, "state_"):
            return self.fit(X)
        for row in X:
            self.state_ = online_update(self.state_, row)
        return self

    def _check_fitted(self):
        if not hasattr(self, "state_"):
            raise RuntimeError("StreamingPCA instance is not fitted yet")

    @property
    def components_(self):
        self._check_fitted()
        return self.components_matrix.T

    @property
    def components_matrix(self):
        self._check_fitted()
        return self.state_.components

    @property
    def explained_variance_(self):
        self._check_fitted()
        return self.state_.eigenvalues
