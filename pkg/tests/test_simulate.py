import numpy as np
import pytest

from nosecp import ScenarioKind, generate
from nosecp.errors import DomainError
from nosecp.simulate import SETTINGS


class TestGenerate:
    def test_unknown_setting(self):
        with pytest.raises(DomainError):
            generate("S99", 0)

    def test_deterministic(self):
        a, _ = generate("S1", 123)
        b, _ = generate("S1", 123)
        np.testing.assert_array_equal(a.values, b.values)

    def test_name_normalisation(self):
        a, _ = generate("s.1", 4)
        b, _ = generate("S1", 4)
        np.testing.assert_array_equal(a.values, b.values)

    def test_s1_shape_and_segment_means(self):
        data, truth = generate("S1", 5)
        assert data.n == 400
        assert truth.k == 7
        bounds = np.concatenate(([0], truth.changepoints, [400]))
        sigma = np.sqrt(2.0)
        for i, mu in enumerate(truth.segment_values):
            seg = data.values[bounds[i]:bounds[i + 1]]
            tol = 3 * sigma / np.sqrt(seg.size)
            assert abs(seg.mean() - mu) < tol + 0.25  # allowance for 3-SE tail

    def test_s3_integer_counts(self):
        data, truth = generate("S3", 9)
        assert truth.kind is ScenarioKind.POISSON_RATE
        assert np.all(data.values >= 0)
        assert np.all(data.values == np.floor(data.values))

    def test_s6_grouped_pairs(self):
        data, truth = generate("S6", 1)
        assert data.n == 240
        assert data.values.size == 480
        assert data.covariates is not None
        assert np.all((data.covariates >= -2) & (data.covariates <= 2))

    def test_every_setting_generates(self):
        for name, cfg in SETTINGS.items():
            data, truth = generate(name, 0)
            assert data.n == cfg["n"]
            assert truth.k == len(cfg["tau"])
            assert 0 < truth.changepoints[0] < truth.changepoints[-1] < truth.n

    def test_s1_moments_over_many_seeds(self):
        # per-segment first and second moments against the printed values
        means = np.zeros(8)
        sds = np.zeros(8)
        n_seeds = 100
        for seed in range(n_seeds):
            data, truth = generate("S1", seed)
            bounds = np.concatenate(([0], truth.changepoints, [400]))
            for i in range(8):
                seg = data.values[bounds[i]:bounds[i + 1]]
                means[i] += seg.mean() / n_seeds
                sds[i] += seg.std(ddof=1) / n_seeds
        truth_mu = np.array(SETTINGS["S1"]["values"])
        se = np.sqrt(2.0) / np.sqrt(50.0 * n_seeds)
        assert np.all(np.abs(means - truth_mu) < 3 * se)
        assert np.all(np.abs(sds - np.sqrt(2.0)) < 0.05)

    def test_s4_scale_moments(self):
        sds = np.zeros(8)
        n_seeds = 100
        for seed in range(n_seeds):
            data, truth = generate("S4", seed)
            bounds = np.concatenate(([0], truth.changepoints, [756]))
            for i in range(8):
                sds[i] += data.values[bounds[i]:bounds[i + 1]].std(ddof=1) / n_seeds
        np.testing.assert_allclose(sds, SETTINGS["S4"]["values"], rtol=0.05)

    def test_ms2_autocorrelated_noise(self):
        # noise is an order-1 recursion with coefficient .5 and unit innovations
        resid_corr = []
        for seed in range(40):
            data, truth = generate("MS2", seed)
            bounds = np.concatenate(([0], truth.changepoints, [400]))
            mu = np.repeat(truth.segment_values, np.diff(bounds))
            eps = data.values - mu
            resid_corr.append(np.corrcoef(eps[:-1], eps[1:])[0, 1])
        assert np.mean(resid_corr) == pytest.approx(0.5, abs=0.05)

    def test_ms3_is_ar_data(self):
        data, truth = generate("MS3", 3)
        assert truth.kind is ScenarioKind.AR1
        assert data.n == 450
        assert truth.k == 5
