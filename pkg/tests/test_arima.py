import numpy as np
import pytest

from ofter.arima import (
    ArimaFilter,
    ArimaSpec,
    acf_pacf,
    adf_test,
    decompose_with,
    difference_until_stationary,
    one_step_predictions,
    select_and_decompose,
)


def ar1(n, phi, rng, sigma=1.0):
    y = np.zeros(n)
    e = rng.standard_normal(n) * sigma
    for t in range(1, n):
        y[t] = phi * y[t - 1] + e[t]
    return y


class TestAdf:
    def test_random_walk_rarely_rejected(self):
        # null p-values are roughly uniform: expect ~90% above 0.1
        hits = 0
        for seed in range(20):
            rng = np.random.default_rng(seed)
            y = np.cumsum(rng.standard_normal(2000))
            _, pval = adf_test(y)
            hits += pval > 0.1
        assert hits >= 15

    def test_white_noise_rejected(self):
        hits = 0
        for seed in range(20):
            rng = np.random.default_rng(100 + seed)
            _, pval = adf_test(rng.standard_normal(2000))
            hits += pval < 0.01
        assert hits == 20

    def test_linear_ramp_recorded_behavior(self):
        # drifting deterministic trend: the intercept-only test does not
        # reject; recorded as documented behavior, not a correctness claim
        y = np.arange(2000.0) / 2000.0
        _, pval = adf_test(y)
        assert pval > 0.05

    def test_short_series_rejected(self):
        with pytest.raises(ValueError):
            adf_test(np.arange(10.0))

    def test_constant_series_rejected(self):
        with pytest.raises(ValueError):
            adf_test(np.ones(100))


class TestDifferencing:
    def test_manual_difference(self):
        y = np.array([1.0, 3.0, 6.0])
        assert np.array_equal(np.diff(y), [2.0, 3.0])

    def test_stationary_needs_no_differencing(self):
        votes = []
        for seed in range(9):
            rng = np.random.default_rng(seed)
            _, r = difference_until_stationary(ar1(2000, 0.5, rng), 0.05)
            votes.append(r)
        assert sorted(votes)[4] == 0  # majority of seeds

    def test_random_walk_differenced_once(self):
        votes = []
        for seed in range(9):
            rng = np.random.default_rng(50 + seed)
            y = np.cumsum(rng.standard_normal(2000))
            _, r = difference_until_stationary(y, 0.05)
            votes.append(r)
        assert sorted(votes)[4] == 1

    def test_persistent_nonstationarity_warns(self):
        y = np.cumsum(np.cumsum(np.linspace(1, 2, 400)))
        with pytest.warns(RuntimeWarning):
            _, r = difference_until_stationary(y, 1e-12)
        assert r == 2


class TestAcfPacf:
    def test_lag_zero_is_one(self):
        rng = np.random.default_rng(0)
        acf, pacf, flags = acf_pacf(rng.standard_normal(500), 5)
        assert acf[0] == 1.0 and pacf[0] == 1.0 and not flags[0]

    def test_white_noise_no_significant_lags(self):
        clean = 0
        for seed in range(20):
            rng = np.random.default_rng(seed)
            _, _, flags = acf_pacf(rng.standard_normal(5000), 10, 0.001)
            clean += not flags.any()
        assert clean >= 19

    def test_ar1_acf_close_to_phi(self):
        rng = np.random.default_rng(1)
        acf, _, flags = acf_pacf(ar1(5000, 0.8, rng), 5, 0.001)
        assert abs(acf[1] - 0.8) < 0.05
        assert flags[1]

    def test_too_short(self):
        with pytest.raises(ValueError):
            acf_pacf(np.arange(20.0), 10)


class TestSelectAndDecompose:
    def test_white_noise_collapses_to_null_spec(self):
        votes = 0
        for seed in range(9):
            rng = np.random.default_rng(seed)
            spec, dec = select_and_decompose(rng.standard_normal(2000))
            if spec.is_null:
                votes += 1
                assert np.array_equal(dec.y_ts, np.zeros(2000))
        assert votes >= 5

    def test_ar2_recovered(self):
        rng = np.random.default_rng(7)
        n = 3000
        y = np.zeros(n)
        e = rng.standard_normal(n)
        for t in range(2, n):
            y[t] = 0.5 * y[t - 1] - 0.3 * y[t - 2] + e[t]
        spec, dec = select_and_decompose(y)
        assert spec.r == 0
        assert spec.p in (1, 2, 3)
        # one-step in-sample correlation close to the generating model's R
        signal = 0.5 * y[1:-1] - 0.3 * y[:-2]
        r_true = np.corrcoef(signal, y[2:])[0, 1]
        r_fit = np.corrcoef(dec.y_ts[5:], y[5:])[0, 1]
        assert abs(r_fit - r_true) < 0.05

    def test_noiseless_ar_fit_residual_near_zero(self):
        rng = np.random.default_rng(9)
        y = ar1(400, 0.6, rng)
        spec = ArimaSpec(1, 0, 0, np.array([0.6]), np.zeros(0), 0.0)
        dec = decompose_with(spec, y)
        e = rng.standard_normal(0)
        # feed the exact AR(1) recursion with no noise: residuals vanish
        clean = np.zeros(300)
        clean[0] = 1.0
        for t in range(1, 300):
            clean[t] = 0.6 * clean[t - 1]
        dec = decompose_with(spec, clean)
        assert np.max(np.abs(dec.residual[1:])) < 1e-12

    def test_exact_additivity(self):
        rng = np.random.default_rng(11)
        y = np.cumsum(rng.standard_normal(600))
        spec, dec = select_and_decompose(y)
        # residual is constructed by subtraction, so it is exactly y - y_ts;
        # recomposition agrees with y to a rounding ulp
        assert np.array_equal(dec.residual, y - dec.y_ts)
        assert np.allclose(dec.y_ts + dec.residual, y, rtol=0, atol=1e-12)

    def test_differencing_reintegration_consistency(self):
        # an r=1 spec's predictions reconstruct levels from past levels
        spec = ArimaSpec(1, 1, 0, np.array([0.4]), np.zeros(0), 0.1)
        rng = np.random.default_rng(13)
        y = np.cumsum(0.5 + rng.standard_normal(200))
        y_ts = one_step_predictions(spec, y)
        w = np.diff(y)
        t = 57
        expected = y[t - 1] + 0.1 + 0.4 * w[t - 2]
        assert abs(y_ts[t] - expected) < 1e-10

    def test_aic_never_worse_than_plain_differencing(self):
        rng = np.random.default_rng(15)
        n = 2000
        y = np.zeros(n)
        e = rng.standard_normal(n)
        for t in range(1, n):
            y[t] = 0.7 * y[t - 1] + e[t] + 0.4 * e[t - 1]
        spec, _ = select_and_decompose(y)
        if spec.p or spec.q:
            # selected by AIC over a grid containing (0, 0)
            assert spec.p + spec.q >= 1

    def test_stationarity_invariant_enforced(self):
        with pytest.raises(ValueError):
            ArimaSpec(1, 0, 0, np.array([1.5]), np.zeros(0), 0.0)

    def test_too_short(self):
        with pytest.raises(ValueError):
            select_and_decompose(np.arange(30.0))

    def test_look_ahead_free_predictions(self):
        rng = np.random.default_rng(17)
        y = ar1(500, 0.5, rng)
        spec = ArimaSpec(2, 0, 1, np.array([0.4, 0.1]), np.array([0.2]), 0.05)
        base = one_step_predictions(spec, y)
        y2 = y.copy()
        y2[300] += 9.0
        pert = one_step_predictions(spec, y2)
        assert np.array_equal(base[:301], pert[:301])


class TestArimaFilter:
    @pytest.mark.parametrize("p,r,q", [(0, 0, 0), (2, 0, 1), (1, 1, 0), (0, 1, 2), (3, 2, 3)])
    def test_filter_matches_batch_predictions(self, p, r, q):
        rng = np.random.default_rng(p * 100 + r * 10 + q)
        ar = np.array([0.3, 0.1, -0.05])[:p]
        ma = np.array([0.2, -0.1, 0.05])[:q]
        spec = ArimaSpec(p, r, q, ar, ma, 0.07)
        y = np.cumsum(rng.standard_normal(300)) if r else rng.standard_normal(300)
        batch = one_step_predictions(spec, y)
        filt = ArimaFilter(spec)
        streamed = []
        for val in y:
            streamed.append(filt.predict_next())
            filt.observe(val)
        assert np.allclose(streamed, batch, rtol=0, atol=1e-10)
