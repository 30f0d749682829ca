"""One-sided maximal correlation through a Bernstein polynomial basis.

The score of a feature against a target is the largest Pearson correlation
achievable by transforming the feature alone within the span of a
fixed polynomial basis.  With the design matrix centered, the optimal
coefficient vector has a closed form: a (ridge-stabilized) inverse of the
basis Gram matrix applied to the basis/target cross-moments, rescaled so
the transformed feature has zero mean and unit sample variance.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

RIDGE_REL = 1e-8  # Gram ridge, relative to trace(A)/K
DOMAIN_PAD = 0.01  # padding of the fitted feature range


@dataclass(frozen=True)
class BernsteinBasis:
    """Degree-n Bernstein functions over an affinely mapped feature range.

    The domain map sends [lo, hi] (the observed range widened by 1%) onto
    [0, 1]; out-of-range inputs clamp, so out-of-window evaluation is
    always defined.
    """

    degree: int
    lo: float
    hi: float

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError("degree must be non-negative")
        if not self.hi > self.lo:
            raise ValueError("degenerate domain")

    @property
    def n_functions(self) -> int:
        return self.degree + 1

    @classmethod
    def from_observations(cls, v, degree: int) -> "BernsteinBasis":
        v = np.asarray(v, dtype=float)
        lo, hi = float(v.min()), float(v.max())
        if hi <= lo:
            raise ValueError("cannot fit a domain map on a constant vector")
        pad = DOMAIN_PAD * (hi - lo)
        return cls(degree=degree, lo=lo - pad, hi=hi + pad)

    def map_to_unit(self, v) -> np.ndarray:
        u = (np.asarray(v, dtype=float) - self.lo) / (self.hi - self.lo)
        return np.clip(u, 0.0, 1.0)

    def evaluate(self, v) -> np.ndarray:
        """Uncentered design: column nu is C(n,nu) x^nu (1-x)^(n-nu)."""
        x = self.map_to_unit(v)
        n = self.degree
        cols = [comb(n, nu) * x ** nu * (1.0 - x) ** (n - nu) for nu in range(n + 1)]
        return np.column_stack(cols)


@dataclass(frozen=True)
class OsmcResult:
    c: np.ndarray
    value: float
    basis: BernsteinBasis


def bernstein_design(v1, degree: int, basis: BernsteinBasis | None = None):
    """Centered N x (degree+1) Bernstein design for the observations ``v1``.

    Returns (design, basis).  Requires more rows than basis functions and a
    non-constant input.
    """
    v1 = np.asarray(v1, dtype=float)
    if v1.ndim != 1:
        raise ValueError("v1 must be a vector")
    k = degree + 1
    if v1.size <= k:
        raise ValueError(f"need more than {k} observations for degree {degree}")
    if basis is None:
        basis = BernsteinBasis.from_observations(v1, degree)
    phi = basis.evaluate(v1)
    return phi - phi.mean(axis=0), basis


def osmc_fit(v1, v2, n_basis: int) -> OsmcResult:
    """Best basis-transform of v1 against v2, with the achieved correlation.

    The coefficient solve uses the Gram matrix with a small relative ridge
    (the centered partition-of-unity design is rank deficient by one), and
    the result is rescaled so the transform has exactly unit sample
    variance.  The reported value is non-negative: the coefficient sign is
    flipped when needed, which downstream squaring cannot observe.
    """
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    if v1.shape != v2.shape or v1.ndim != 1:
        raise ValueError("v1 and v2 must be vectors of equal length")
    if n_basis < 2:
        raise ValueError("need at least two basis functions")
    if np.ptp(v2) == 0.0:
        raise ValueError("target vector is constant")
    n = v1.size
    phi, basis = bernstein_design(v1, n_basis - 1)

    zbar = phi.T @ (v2 - v2.mean())
    gram = phi.T @ phi / (n - 1)
    ridged = gram + (RIDGE_REL * np.trace(gram) / n_basis) * np.eye(n_basis)
    c = np.linalg.solve(ridged, zbar)
    quad = float(zbar @ c)
    if quad <= 0.0:
        raise ValueError("degenerate design: regularized solution vanished")
    c = c / np.sqrt(quad)

    transformed = phi @ c
    sd = float(transformed.std(ddof=1))
    if sd <= 0.0:
        raise ValueError("degenerate design: transform has no variance")
    c = c / sd
    transformed = transformed / sd

    v2c = v2 - v2.mean()
    value = float(transformed @ v2c / np.sqrt((transformed @ transformed) * (v2c @ v2c)))
    if value < 0.0:
        c = -c
        value = -value
    return OsmcResult(c=c, value=value, basis=basis)


def osmc(v1, v2, n_basis: int) -> float:
    """The one-sided maximal correlation score of v1 against v2."""
    return osmc_fit(v1, v2, n_basis).value
