"""Independent reference implementations used to cross-check the library.

Everything here is deliberately naive (Jacobi sweeps, brute-force sorts,
normal equations, textbook formulas) and shares no code with the package.
"""

import numpy as np


def jacobi_eig(A, tol=1e-13, max_sweeps=100):
    """Classic cyclic Jacobi rotations; returns (eigenvalues desc, vectors)."""
    A = np.array(A, dtype=float)
    n = A.shape[0]
    V = np.eye(n)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(A, -1) ** 2))
        if off < tol * max(1.0, np.max(np.abs(np.diag(A)))):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if A[p, q] == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * A[p, q])
                t = np.sign(theta) / (np.abs(theta) + np.sqrt(theta ** 2 + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t ** 2 + 1.0)
                s = t * c
                J = np.eye(n)
                J[p, p] = J[q, q] = c
                J[p, q] = s
                J[q, p] = -s
                A = J.T @ A @ J
                V = V @ J
    lam = np.diag(A).copy()
    order = np.argsort(-lam, kind="stable")
    return lam[order], V[:, order]


def brute_force_knn(history, targets, query, k, weights):
    """Weighted k-NN mean by explicit sort; ties broken by earlier row."""
    d = np.sqrt(np.sum(weights * (history - query) ** 2, axis=1))
    order = sorted(range(len(d)), key=lambda i: (d[i], i))
    return float(np.mean([targets[i] for i in order[:k]]))


def normal_equations_ols(X, y):
    """Intercept-augmented least squares via the normal equations."""
    A = np.hstack([np.ones((X.shape[0], 1)), X])
    beta = np.linalg.solve(A.T @ A, A.T @ y)
    return float(beta[0]), beta[1:]


def pearson(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a = a - a.mean()
    b = b - b.mean()
    return float(a @ b / np.sqrt((a @ a) * (b @ b)))


def quantile_portfolio_day(signals, quantile):
    """Indices of the top (6-q)*20% magnitudes, ties by instrument index."""
    n = len(signals)
    m = int(np.ceil((6 - quantile) / 5.0 * n))
    order = sorted(range(n), key=lambda i: (-abs(signals[i]), i))
    return sorted(order[:m])


def generate_m1(t_len, rng):
    e = rng.standard_normal((t_len, 5))
    y = np.zeros((t_len, 5))
    for t in range(1, t_len):
        y[t, 0] = 0.2 * y[t - 1, 0] - 0.4 * y[t - 1, 1] + e[t, 0]
        y[t, 1] = -0.5 * y[t - 1, 0] + 0.15 * y[t - 1, 1] + e[t, 1]
        y[t, 2] = -0.14 * y[t - 1, 1] + e[t, 2]
        y[t, 3] = 0.5 * y[t - 1, 0] - 0.25 * y[t - 1, 1] + e[t, 3]
        y[t, 4] = 0.15 * y[t - 1, 0] + e[t, 4]
    return y
