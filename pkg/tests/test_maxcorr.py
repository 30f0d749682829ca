import numpy as np
import pytest

from ofter.maxcorr import BernsteinBasis, bernstein_design, osmc, osmc_fit
from oracles import pearson


class TestBernsteinDesign:
    def test_single_value_definition(self):
        basis = BernsteinBasis(degree=2, lo=0.0, hi=1.0)
        row = basis.evaluate(np.array([0.5]))[0]
        assert abs(row[1] - 0.5) < 1e-15  # b_{1,2}(0.5) = 2 * 0.5 * 0.5

    def test_partition_of_unity(self):
        basis = BernsteinBasis(degree=4, lo=0.0, hi=1.0)
        rows = basis.evaluate(np.linspace(0, 1, 37))
        assert np.allclose(rows.sum(axis=1), 1.0, atol=1e-14)

    def test_centering(self):
        grid = np.linspace(0.0, 1.0, 50)
        phi, _ = bernstein_design(grid, 2)
        assert np.max(np.abs(phi.mean(axis=0))) < 1e-14

    def test_clamping_out_of_range(self):
        basis = BernsteinBasis.from_observations(np.linspace(0, 1, 20), 2)
        inside = basis.evaluate(np.array([basis.hi]))
        outside = basis.evaluate(np.array([basis.hi + 10.0]))
        assert np.allclose(inside, outside)

    def test_constant_input_rejected(self):
        with pytest.raises(ValueError):
            bernstein_design(np.ones(10), 2)

    def test_too_few_rows(self):
        with pytest.raises(ValueError):
            bernstein_design(np.arange(3.0), 3)


class TestOsmcFit:
    def test_linear_relation_in_span(self):
        rng = np.random.default_rng(0)
        v1 = rng.standard_normal(500)
        v2 = 2.0 * v1 + 1.0
        assert osmc(v1, v2, 3) > 1.0 - 1e-8

    def test_quadratic_beats_pearson(self):
        v1 = np.linspace(0.0, 1.0, 400)
        v2 = (v1 - 0.5) ** 2
        assert abs(pearson(v1, v2)) < 1e-8
        assert osmc(v1, v2, 3) > 1.0 - 1e-6

    def test_independent_noise_scores_low(self):
        rng = np.random.default_rng(1)
        v1 = rng.standard_normal(10_000)
        v2 = rng.standard_normal(10_000)
        assert osmc(v1, v2, 3) < 0.05

    def test_constraints_satisfied(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            v1 = rng.standard_normal(200)
            v2 = rng.standard_normal(200) + 0.3 * v1
            res = osmc_fit(v1, v2, 4)
            phi, _ = bernstein_design(v1, 3, basis=res.basis)
            transformed = phi @ res.c
            assert abs(transformed.mean()) < 1e-8
            assert abs(transformed.var(ddof=1) - 1.0) < 1e-8
            assert res.value <= 1.0 + 1e-10

    def test_value_equals_pearson_of_transform(self):
        rng = np.random.default_rng(3)
        v1 = rng.standard_normal(300)
        v2 = np.tanh(v1) + 0.5 * rng.standard_normal(300)
        res = osmc_fit(v1, v2, 4)
        phi, _ = bernstein_design(v1, 3, basis=res.basis)
        assert abs(res.value - abs(pearson(phi @ res.c, v2))) < 1e-12

    def test_constant_target_rejected(self):
        with pytest.raises(ValueError):
            osmc_fit(np.arange(20.0), np.ones(20), 3)


class TestOsmcProperties:
    def test_self_correlation_is_one(self):
        rng = np.random.default_rng(4)
        for _ in range(5):
            v = rng.standard_normal(150)
            assert osmc(v, v, 2) > 1.0 - 1e-8

    def test_affine_invariance_of_feature(self):
        rng = np.random.default_rng(5)
        v1 = rng.standard_normal(250)
        v2 = v1 ** 2 + rng.standard_normal(250)
        a = osmc(v1, v2, 4)
        b = osmc(3.5 * v1 - 7.0, v2, 4)
        assert abs(a - b) < 1e-10

    def test_dominates_pearson(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            v1 = rng.standard_normal(120)
            v2 = rng.standard_normal(120) + rng.uniform(-1, 1) * v1
            assert osmc(v1, v2, 2) >= abs(pearson(v1, v2)) - 1e-8

    def test_monotone_in_basis_size(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            v1 = rng.standard_normal(200)
            v2 = np.sin(2 * v1) + 0.3 * rng.standard_normal(200)
            scores = [osmc(v1, v2, k) for k in range(2, 7)]
            for small, big in zip(scores[:-1], scores[1:]):
                assert big >= small - 1e-8
