import numpy as np
import pytest

from ofter.spectra import (
    EigenSystem,
    RankOneUpdate,
    full_eig,
    rank_one_update,
    secular_roots,
    truncated_secular_roots,
)
from oracles import jacobi_eig


def random_symmetric(rng, d):
    A = rng.standard_normal((d, d))
    return (A + A.T) / 2.0


class TestFullEig:
    def test_identity(self):
        sys = full_eig(np.eye(3))
        assert np.allclose(sys.eigenvalues, np.ones(3))

    def test_diagonal(self):
        sys = full_eig(np.diag([2.0, 1.0]))
        assert np.allclose(sys.eigenvalues, [2.0, 1.0])
        assert np.allclose(np.abs(sys.eigenvectors), np.eye(2), atol=1e-12)

    def test_against_jacobi_oracle(self):
        rng = np.random.default_rng(7)
        A = random_symmetric(rng, 10)
        sys = full_eig(A)
        lam_j, _ = jacobi_eig(A)
        assert np.allclose(sys.eigenvalues, lam_j, atol=1e-10)
        assert np.max(np.abs(sys.reconstruct() - A)) < 1e-10

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            full_eig(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            full_eig(np.array([[np.nan, 0.0], [0.0, 1.0]]))


class TestSecularRoots:
    def test_two_by_two_hand_example(self):
        # diag(2,1) + v v^T with v = (1,1)/sqrt(2): eigenvalues 2 +- sqrt(2)/2
        roots = secular_roots([2.0, 1.0], np.array([1.0, 1.0]) / np.sqrt(2), 1.0)
        expected = np.array([2.0 + np.sqrt(0.5), 2.0 - np.sqrt(0.5)])
        assert np.allclose(roots, expected, atol=1e-12)

    def test_decoupled_mass(self):
        roots = secular_roots([3.0, 1.0], [1.0, 0.0], 1.0)
        assert np.allclose(roots, [4.0, 1.0], atol=1e-13)

    def test_matches_dense_solver_d20(self):
        rng = np.random.default_rng(11)
        lam = np.sort(rng.uniform(0.5, 10.0, 20))[::-1]
        v = rng.standard_normal(20)
        v /= np.linalg.norm(v)
        rho = 1.7
        roots = secular_roots(lam, v, rho)
        dense = np.sort(np.linalg.eigvalsh(np.diag(lam) + rho * np.outer(v, v)))[::-1]
        assert np.max(np.abs(roots - dense) / np.abs(dense)) < 1e-9

    def test_negative_rho(self):
        rng = np.random.default_rng(3)
        lam = np.sort(rng.uniform(1.0, 5.0, 8))[::-1]
        v = rng.standard_normal(8)
        v /= np.linalg.norm(v)
        roots = secular_roots(lam, v, -0.9)
        dense = np.sort(np.linalg.eigvalsh(np.diag(lam) - 0.9 * np.outer(v, v)))[::-1]
        assert np.allclose(roots, dense, atol=1e-10)

    def test_trace_conservation(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            d = rng.integers(2, 15)
            lam = np.sort(rng.standard_normal(d))[::-1] * 3.0
            lam = np.sort(lam + np.arange(d)[::-1] * 0.1)[::-1]  # keep distinct
            z = rng.standard_normal(d)
            z /= np.linalg.norm(z)
            rho = float(rng.uniform(0.1, 2.0))
            roots = secular_roots(lam, z, rho)
            assert abs(roots.sum() - (lam.sum() + rho)) < 1e-9 * max(1.0, abs(lam).sum())

    def test_newton_residuals_monotone(self):
        rng = np.random.default_rng(9)
        for _ in range(30):
            lam = np.sort(rng.uniform(0.0, 5.0, 10))[::-1]
            lam += np.arange(10)[::-1] * 1e-3
            z = rng.standard_normal(10)
            z /= np.linalg.norm(z)
            trace = []
            secular_roots(lam, z, 1.3, trace=trace)
            # trace concatenates per-root sequences; check each decreasing run
            run = []
            for val in trace:
                if run and val > run[-1] * (1 + 1e-9):
                    run = [val]  # new root's sequence started
                else:
                    run.append(val)
                assert val <= run[0] * (1 + 1e-9)

    def test_rejects_zero_rho(self):
        with pytest.raises(ValueError):
            secular_roots([2.0, 1.0], [0.5, 0.5], 0.0)

    def test_repeated_eigenvalues_warn(self):
        with pytest.warns(RuntimeWarning):
            roots = secular_roots([1.0, 1.0], np.array([1.0, 1.0]) / np.sqrt(2), 1.0)
        dense = np.sort(
            np.linalg.eigvalsh(np.eye(2) + 0.5 * np.ones((2, 2)))
        )[::-1]
        assert np.allclose(roots, dense, atol=1e-8)


class TestTruncatedSecularRoots:
    def test_degenerate_truncation_equals_full(self):
        rng = np.random.default_rng(13)
        lam = np.sort(rng.uniform(1.0, 6.0, 6))[::-1]
        z = rng.standard_normal(6)
        z /= np.linalg.norm(z)  # full unit mass: tail weight vanishes
        full = secular_roots(lam, z, 0.8)
        trunc = truncated_secular_roots(lam, z, 0.8, mu=0.1, m=6)
        assert np.allclose(trunc, full, atol=1e-10)

    def test_zero_tail_mass_exact(self):
        lam = np.array([5.0, 4.0, 3.0, 2.0])
        z = np.array([0.8, 0.6, 0.0, 0.0])
        top = truncated_secular_roots(lam[:2], z[:2], 1.0, mu=2.5, m=2)
        full = secular_roots(lam, np.array([0.8, 0.6, 0.0, 0.0]), 1.0)
        assert np.allclose(top, full[:2], atol=1e-10)

    def test_clustered_tail_error_bound(self):
        lam = np.array([6.0, 5.0, 1.001, 1.0])
        rng = np.random.default_rng(17)
        z = rng.standard_normal(4)
        z /= np.linalg.norm(z)
        full = secular_roots(lam, z, 1.0)
        mu = np.median(lam[2:])
        approx = truncated_secular_roots(lam[:2], z[:2], 1.0, mu=mu, m=2)
        assert np.max(np.abs(approx - full[:2])) < 2 * abs(lam[2] - lam[3])


class TestRankOneUpdate:
    def test_null_update(self):
        sys = full_eig(np.diag([3.0, 2.0, 1.0]))
        out = rank_one_update(sys, RankOneUpdate(0.0, np.ones(3)))
        assert out is sys

    def test_hand_example_vectors(self):
        sys = full_eig(np.diag([2.0, 1.0]))
        v = np.array([1.0, 1.0]) / np.sqrt(2)
        out = rank_one_update(sys, RankOneUpdate(1.0, v))
        A = np.diag([2.0, 1.0]) + np.outer(v, v)
        ref = full_eig(A)
        assert np.allclose(out.eigenvalues, [2.7071067811865475, 1.2928932188134525], atol=1e-10)
        for k in range(2):
            dot = abs(out.eigenvectors[:, k] @ ref.eigenvectors[:, k])
            assert dot > 1 - 1e-10

    def test_eigen_equation_residuals(self):
        rng = np.random.default_rng(23)
        for _ in range(10):
            d = 12
            A = random_symmetric(rng, d)
            sys = full_eig(A)
            v = rng.standard_normal(d)
            rho = float(rng.uniform(-2.0, 2.0)) or 0.5
            out = rank_one_update(sys, RankOneUpdate(rho, v))
            B = A + rho * np.outer(v, v)
            for k in range(d):
                resid = B @ out.eigenvectors[:, k] - out.eigenvalues[k] * out.eigenvectors[:, k]
                assert np.linalg.norm(resid) < 1e-7
            out.validate(orth_tol=1e-8)

    def test_interlacing_positive_rho(self):
        rng = np.random.default_rng(29)
        for _ in range(25):
            d = 10
            sys = full_eig(random_symmetric(rng, d))
            v = rng.standard_normal(d)
            rho = float(rng.uniform(0.05, 3.0))
            out = rank_one_update(sys, RankOneUpdate(rho, v))
            lam = sys.eigenvalues
            kap = out.eigenvalues
            tol = 1e-10 * max(1.0, np.max(np.abs(lam)))
            assert np.all(kap >= lam - tol)
            assert kap[0] <= lam[0] + rho * np.dot(v, v) + tol
            assert np.all(kap[1:] <= lam[:-1] + tol)

    def test_chain_of_updates_matches_batch(self):
        rng = np.random.default_rng(31)
        d = 15
        A = random_symmetric(rng, d)
        sys = full_eig(A)
        for _ in range(100):
            v = rng.standard_normal(d)
            rho = float(rng.uniform(0.05, 1.0))
            sys = rank_one_update(sys, RankOneUpdate(rho, v))
            A = A + rho * np.outer(v, v)
        ref = full_eig(A)
        rel = np.abs(sys.eigenvalues - ref.eigenvalues) / np.maximum(np.abs(ref.eigenvalues), 1.0)
        assert np.max(rel) < 1e-6
        # subspace agreement via reconstruction
        assert np.max(np.abs(sys.reconstruct() - A)) < 1e-6 * max(1.0, np.max(np.abs(A)))
