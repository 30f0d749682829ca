"""Symmetric eigendecompositions and rank-one spectral updates.

When a symmetric matrix with a known eigendecomposition U diag(lam) U^T is
perturbed by rho * v v^T, the new eigenvalues are the roots of the rational
function

    f(kappa) = 1 + rho * sum_i z_i^2 / (lam_i - kappa),   z = U^T v,

(the secular equation) and each new eigenvector is a rescaled resolvent
U (Lam - kappa I)^{-1} z.  Roots are isolated between consecutive old
eigenvalues, so each one can be found independently.  The solver below
shifts the problem so the wanted root sits in (0, delta_next), substitutes
gamma = xi^{-2} to make the function convex and decreasing on the bracket,
and runs Newton from the left, which converges monotonically.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

# |z_i| below this is treated as exactly zero: the root stays at lam_i.
Z_DEFLATION_TOL = 1e-14
# Eigenvalue ties are detected relative to the spectrum's magnitude.
TIE_REL_TOL = 1e-10
NEWTON_TOL = 1e-13
NEWTON_MAX_ITER = 100
_BISECT_MAX_ITER = 200


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues (descending) paired with orthonormal eigenvector columns.

    ``eigenvectors`` may be d x p with p < d, in which case the object
    describes only the retained part of a spectrum.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.eigenvalues, dtype=float)
        U = np.asarray(self.eigenvectors, dtype=float)
        if lam.ndim != 1 or U.ndim != 2 or U.shape[1] != lam.shape[0]:
            raise ValueError("eigenvalue/eigenvector shapes are inconsistent")
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "eigenvectors", U)

    @property
    def dim(self) -> int:
        return self.eigenvectors.shape[0]

    @property
    def is_square(self) -> bool:
        return self.eigenvectors.shape[0] == self.eigenvectors.shape[1]

    def reconstruct(self) -> np.ndarray:
        """U diag(lam) U^T (the represented part of the matrix)."""
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.T

    def validate(self, orth_tol: float = 1e-10) -> None:
        U = self.eigenvectors
        if not np.all(np.isfinite(self.eigenvalues)) or not np.all(np.isfinite(U)):
            raise ValueError("non-finite eigensystem")
        if np.any(np.diff(self.eigenvalues) > 0):
            raise ValueError("eigenvalues are not sorted descending")
        gram = U.T @ U
        err = np.max(np.abs(gram - np.eye(U.shape[1])))
        if err > orth_tol:
            raise ValueError(f"eigenvector columns not orthonormal (max dev {err:.3e})")


@dataclass(frozen=True)
class RankOneUpdate:
    """A symmetric perturbation rho * v v^T (v need not be unit length)."""

    rho: float
    v: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float)
        if v.ndim != 1:
            raise ValueError("update direction must be a vector")
        if not np.isfinite(self.rho) or not np.all(np.isfinite(v)):
            raise ValueError("non-finite rank-one update")
        object.__setattr__(self, "v", v)


def _fix_signs(U: np.ndarray) -> np.ndarray:
    """Flip columns so each one's largest-magnitude entry is positive."""
    idx = np.argmax(np.abs(U), axis=0)
    signs = np.sign(U[idx, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    return U * signs


def full_eig(matrix: np.ndarray) -> EigenSystem:
    """Eigendecomposition of a symmetric matrix, eigenvalues descending.

    Raises ValueError on non-finite entries or if the matrix deviates from
    symmetry by more than 1e-10 relative to its magnitude.
    """
    A = np.asarray(matrix, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(A))))
    if np.max(np.abs(A - A.T)) > 1e-10 * scale:
        raise ValueError("matrix is not symmetric within tolerance")
    lam, U = np.linalg.eigh((A + A.T) / 2.0)
    order = np.arange(lam.size)[::-1]  # eigh returns ascending
    return EigenSystem(lam[order], _fix_signs(U[:, order]))


def _separate_ties(lam: np.ndarray) -> np.ndarray:
    """Perturb (and warn about) eigenvalues that coincide within tolerance.

    The root isolation argument needs strictly distinct poles.  Runs of tied
    values are spread downward by multiples of the tie tolerance.
    """
    scale = max(float(np.max(np.abs(lam))), 1.0)
    tol = TIE_REL_TOL * scale
    out = lam.copy()
    bumped = False
    for i in range(1, out.size):
        if out[i] > out[i - 1] - tol:
            out[i] = out[i - 1] - tol
            bumped = True
    if bumped:
        warnings.warn(
            "repeated eigenvalues perturbed to restore strict separation",
            RuntimeWarning,
            stacklevel=3,
        )
    return out


def _solve_shifted(deltas: np.ndarray, z2: np.ndarray, trace: list | None = None) -> float:
    """Root xi > 0 of 1 + sum_j z2_j / (deltas_j - xi) with deltas anchored at 0.

    ``deltas`` contains one exact zero (the anchor); the wanted root lies in
    (0, min positive delta), or in (0, sum(z2)] when no delta is positive.
    Newton runs on the convexified variable gamma = xi^{-2}; from any start
    left of the root with positive residual the iterates increase
    monotonically, so no safeguarding is needed in the main loop.  A
    bisection fallback covers the (never observed) iteration-cap case.
    """

    def f(xi: float) -> float:
        return 1.0 + float(np.sum(z2 / (deltas - xi)))

    def fprime(xi: float) -> float:
        return float(np.sum(z2 / (deltas - xi) ** 2))

    pos = deltas[deltas > 0]
    if pos.size:
        pole = float(pos.min())
        # Probe from the midpoint toward the pole until the residual is >= 0,
        # which guarantees the start sits between the root and the pole.
        xi0 = 0.5 * pole
        lo = 0.0  # largest xi seen with f < 0, for the bisection fallback
        for _ in range(80):
            if f(xi0) >= 0.0:
                break
            lo = xi0
            xi0 = 0.5 * (xi0 + pole)
        else:
            return xi0  # root is within 2^-80 of the pole
        hi = xi0
    else:
        # Extreme root: f(sum z2) >= 0 because every delta is <= 0.
        xi0 = float(np.sum(z2))
        if xi0 == 0.0:
            return 0.0
        lo, hi = 0.0, xi0

    gamma = xi0 ** -2
    for _ in range(NEWTON_MAX_ITER):
        xi = gamma ** -0.5
        F = f(xi)
        if trace is not None:
            trace.append(abs(F))
        if abs(F) < NEWTON_TOL:
            return xi
        if F >= 0.0:
            hi = xi
        else:
            lo = max(lo, xi)
        dF = -0.5 * gamma ** -1.5 * fprime(xi)
        step = F / dF
        gamma_new = gamma - step
        if not np.isfinite(gamma_new) or gamma_new <= gamma:
            break  # stalled; convexity means any failure to advance is terminal
        gamma = gamma_new

    # Bisection fallback on [lo, hi] in xi (f < 0 at lo side, >= 0 at hi side).
    for _ in range(_BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class _SecularSolution:
    """Roots plus the stably-computed gaps needed for eigenvector assembly."""

    __slots__ = ("lam", "roots", "active", "gaps")

    def __init__(self, lam, roots, active, gaps):
        self.lam = lam          # tie-separated input eigenvalues
        self.roots = roots      # root attached to each anchor index
        self.active = active    # mask of non-deflated coordinates
        self.gaps = gaps        # gaps[i][j] = lam_active[j] - root_i, or None


def _secular_solve(eigenvalues, z, rho, trace=None) -> _SecularSolution:
    lam = np.asarray(eigenvalues, dtype=float)
    zv = np.asarray(z, dtype=float)
    if lam.shape != zv.shape or lam.ndim != 1:
        raise ValueError("eigenvalues and z must be vectors of equal length")
    if not np.all(np.isfinite(lam)) or not np.all(np.isfinite(zv)):
        raise ValueError("non-finite secular input")
    if rho == 0.0:
        raise ValueError("rho must be nonzero")
    lam = _separate_ties(lam)

    active = np.abs(zv) >= Z_DEFLATION_TOL
    roots = lam.copy()  # deflated coordinates keep their eigenvalue
    gaps: list = [None] * lam.size
    act_idx = np.nonzero(active)[0]
    if act_idx.size:
        lam_a = lam[act_idx]
        z2 = zv[act_idx] ** 2
        for k, i in enumerate(act_idx):
            deltas = (lam_a - lam_a[k]) / rho
            deltas[k] = 0.0
            xi = _solve_shifted(deltas, z2, trace)
            roots[i] = lam_a[k] + rho * xi
            # lam_a - root computed in the shifted frame: no cancellation at
            # the anchor, and only benign cancellation at the binding pole.
            gaps[i] = rho * (deltas - xi)
    return _SecularSolution(lam, roots, active, gaps)


def secular_roots(eigenvalues, z, rho: float, trace=None) -> np.ndarray:
    """All d roots of 1 + rho * sum z_i^2 / (lam_i - kappa), sorted descending.

    ``eigenvalues`` must be strictly descending; coordinates with |z_i| below
    the deflation tolerance contribute their eigenvalue unchanged.  ``trace``,
    if given, collects |F| across Newton iterates (test hook).
    """
    sol = _secular_solve(eigenvalues, z, rho, trace)
    order = np.argsort(-sol.roots, kind="stable")
    return sol.roots[order]


def truncated_secular_roots(eigenvalues, z, rho: float, mu: float, m: int) -> np.ndarray:
    """The m largest roots of the tail-collapsed secular equation.

    The discarded part of the spectrum is represented by the single value
    ``mu`` carrying the leftover weight 1 - sum(z_i^2); callers are expected
    to pass z computed from a unit-norm update direction.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    zv = np.asarray(z, dtype=float)
    if m > lam.size:
        raise ValueError("m exceeds the number of retained eigenvalues")
    tail_w2 = max(0.0, 1.0 - float(np.sum(zv ** 2)))
    lam_aug = np.append(lam, mu)
    z_aug = np.append(zv, np.sqrt(tail_w2))
    roots = secular_roots(lam_aug, z_aug, rho)
    return roots[:m]


def rank_one_update(system: EigenSystem, update: RankOneUpdate) -> EigenSystem:
    """Eigensystem of U diag(lam) U^T + rho * v v^T.

    Eigenvalues come from the secular roots with z = U^T (v/||v||) and
    effective rho ||v||^2; eigenvectors from the normalized resolvent
    formula.  A zero update returns the input unchanged.
    """
    if not system.is_square:
        raise ValueError("rank_one_update needs a full (square) eigensystem")
    v = update.v
    if v.shape[0] != system.dim:
        raise ValueError("update direction has wrong dimension")
    vnorm = float(np.linalg.norm(v))
    if update.rho == 0.0 or vnorm == 0.0:
        return system

    U = system.eigenvectors
    z = U.T @ (v / vnorm)
    rho_eff = update.rho * vnorm ** 2
    sol = _secular_solve(system.eigenvalues, z, rho_eff)

    d = system.dim
    vecs = np.empty((d, d))
    act_idx = np.nonzero(sol.active)[0]
    z_active = z[act_idx]
    U_active = U[:, act_idx]
    for i in range(d):
        if sol.gaps[i] is None:
            vecs[:, i] = U[:, i]
        else:
            w = z_active / sol.gaps[i]
            u = U_active @ w
            vecs[:, i] = u / np.linalg.norm(u)

    order = np.argsort(-sol.roots, kind="stable")
    return EigenSystem(sol.roots[order], _fix_signs(vecs[:, order]))
