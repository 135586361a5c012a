import numpy as np
import pytest

from sadkit.errors import DegenerateModelWarning, FitError
from sadkit.sad import BiGaussianDetector, bigaussian_mask, equal_probability_threshold, fit_bigaussian
from sadkit.audio import FramingSpec, Waveform, frame_signal


def gaussian_pdf(x, mean, var):
    return np.exp(-0.5 * (x - mean) ** 2 / var) / np.sqrt(2 * np.pi * var)


def grid_search_crossing(w1, mu1, var1, w2, mu2, var2, step=1e-5):
    """Independent dense-grid oracle for the equal-probability point."""
    grid = np.arange(mu1, mu2 + step, step)
    gap = w1 * gaussian_pdf(grid, mu1, var1) - w2 * gaussian_pdf(grid, mu2, var2)
    sign_change = np.flatnonzero(np.sign(gap[:-1]) * np.sign(gap[1:]) < 0)
    assert sign_change.size > 0, "oracle found no crossing"
    i = sign_change[0]
    return 0.5 * (grid[i] + grid[i + 1])


class TestEqualProbabilityThreshold:
    def test_matches_grid_oracle_asymmetric(self):
        # exact model parameters, no EM involved
        theta = equal_probability_threshold(0.5, -20.0, 1.0, 0.5, 0.0, 4.0)
        oracle = grid_search_crossing(0.5, -20.0, 1.0, 0.5, 0.0, 4.0)
        assert abs(theta - oracle) < 1e-3
        assert -20.0 < theta < 0.0

    def test_symmetric_midpoint(self):
        theta = equal_probability_threshold(0.5, -20.0, 1.0, 0.5, 0.0, 1.0)
        assert theta == pytest.approx(-10.0, abs=1e-6)

    def test_densities_equal_at_threshold(self):
        rng = np.random.default_rng(2)
        for _ in range(25):
            mu1 = float(rng.uniform(-40, -10))
            mu2 = mu1 + float(rng.uniform(3, 30))
            var1 = float(rng.uniform(0.2, 9))
            var2 = float(rng.uniform(0.2, 9))
            w1 = float(rng.uniform(0.2, 0.8))
            theta = equal_probability_threshold(w1, mu1, var1, 1 - w1, mu2, var2)
            gap = w1 * gaussian_pdf(theta, mu1, var1) - (1 - w1) * gaussian_pdf(theta, mu2, var2)
            assert abs(gap) < 1e-6
            assert mu1 <= theta <= mu2

    def test_equal_means_degenerates_to_common_mean(self):
        assert equal_probability_threshold(0.5, -5.0, 1.0, 0.5, -5.0, 2.0) == -5.0


class TestFitBiGaussian:
    def test_symmetric_synthetic(self):
        rng = np.random.default_rng(42)
        x = np.concatenate([rng.normal(-20, 1, 5000), rng.normal(0, 1, 5000)])
        model = fit_bigaussian(x)
        assert model.theta == pytest.approx(-10.0, abs=0.5)
        assert model.mu1 < model.mu2
        assert model.w1 + model.w2 == pytest.approx(1.0, abs=1e-9)

    def test_frame_labeling_error_below_1pct(self):
        rng = np.random.default_rng(7)
        labels = rng.random(10_000) < 0.4
        x = np.where(labels, rng.normal(0, 1, 10_000), rng.normal(-20, 1, 10_000))
        mask, model = bigaussian_mask(x)
        assert np.mean(mask != labels) < 0.01
        assert model.mu1 <= model.theta <= model.mu2

    def test_shift_invariance_of_mask(self):
        rng = np.random.default_rng(8)
        x = np.concatenate([rng.normal(-30, 2, 3000), rng.normal(-5, 2, 2000)])
        base_mask, base_model = bigaussian_mask(x)
        shifted_mask, shifted_model = bigaussian_mask(x + 17.5)
        np.testing.assert_array_equal(base_mask, shifted_mask)
        assert shifted_model.theta - base_model.theta == pytest.approx(17.5, abs=1e-3)

    def test_zero_variance_rejected(self):
        with pytest.raises(FitError):
            fit_bigaussian(np.full(100, -30.0))

    def test_too_few_frames(self):
        with pytest.raises(FitError):
            fit_bigaussian(np.arange(5, dtype=float))

    def test_mask_covers_high_mode(self):
        rng = np.random.default_rng(9)
        x = np.concatenate([rng.normal(-25, 1, 4000), rng.normal(-3, 1, 1000)])
        mask, _ = bigaussian_mask(x)
        assert mask[4000:].mean() > 0.99
        assert mask[:4000].mean() < 0.01


class TestBiGaussianDetector:
    def test_detector_on_bimodal_signal(self):
        rng = np.random.default_rng(10)
        quiet = 0.001 * rng.standard_normal(8000)
        loud = 0.3 * rng.standard_normal(8000)
        x = np.concatenate([quiet, loud, quiet.copy()])
        frames = frame_signal(Waveform(x, 8000, "u"), FramingSpec(20.0, 10.0))
        det = BiGaussianDetector()
        decisions = det.predict(frames)
        assert decisions.size == frames.num_frames
        # the loud second third is selected
        third = frames.num_frames // 3
        assert decisions[third + 2 : 2 * third - 2].mean() > 0.95
        assert decisions[: third - 2].mean() < 0.05
        assert det.model_.mu1 < det.model_.mu2

    def test_degenerate_warning_on_equal_means(self):
        with pytest.warns(DegenerateModelWarning):
            equal_probability_threshold(0.9999, -5.0, 0.01, 0.0001, -4.99, 0.01)
