import numpy as np
import pytest

from sadkit.audio import FramingSpec, Waveform, frame_signal
from sadkit.errors import FramingError
from sadkit.sad import SohnDetector, apply_hangover, log_likelihood_ratio

SR = 8000
SPEC = FramingSpec(20.0, 10.0, "rectangular")


def frames_of(x):
    return frame_signal(Waveform(x, SR, "u"), SPEC)


def burst_signal(rng, snr_db, noise_amp=0.05, seconds=10, burst_len=SR // 2, period=2 * SR):
    x = noise_amp * rng.standard_normal(SR * seconds)
    burst = np.zeros(len(x), dtype=bool)
    amp = np.sqrt(2 * np.mean(x**2) * 10 ** (snr_db / 10))
    for start in range(SR, len(x) - burst_len, period):
        t = np.arange(start, start + burst_len) / SR
        x[start : start + burst_len] += amp * np.sin(2 * np.pi * 1000 * t)
        burst[start : start + burst_len] = True
    return x, burst


def burst_frame_truth(burst, num_frames, frame_len=160, hop=80):
    return np.array([burst[i * hop : i * hop + frame_len].all() for i in range(num_frames)])


class TestLogLikelihoodRatio:
    def test_zero_prior_snr_gives_zero(self):
        gamma = np.array([0.5, 1.0, 7.0])
        np.testing.assert_allclose(log_likelihood_ratio(gamma, np.zeros(3)), 0.0)

    def test_plugin_value(self):
        assert log_likelihood_ratio(1.0, 1.0) == pytest.approx(0.5 - np.log(2), abs=1e-12)


class TestApplyHangover:
    def test_extends_after_last_detection(self):
        raw = np.array([0, 1, 0, 0, 0, 0], dtype=bool)
        out = apply_hangover(raw, 2)
        np.testing.assert_array_equal(out, [False, True, True, True, False, False])

    def test_zero_hangover_is_identity(self):
        raw = np.array([1, 0, 1, 0], dtype=bool)
        np.testing.assert_array_equal(apply_hangover(raw, 0), raw)

    def test_never_removes_detections(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            raw = rng.random(50) < 0.3
            out = apply_hangover(raw, int(rng.integers(0, 6)))
            assert np.all(out[raw])


class TestSohnDetector:
    def test_too_few_frames(self):
        x = 0.01 * np.random.default_rng(1).standard_normal(400)
        with pytest.raises(FramingError):
            SohnDetector(n_init=10).predict(frames_of(x))

    def test_stationary_noise_low_false_rate(self):
        rng = np.random.default_rng(7)
        frames = frames_of(0.05 * rng.standard_normal(SR * 10))
        decisions = SohnDetector().predict(frames)
        assert decisions.size == frames.num_frames
        assert decisions.mean() <= 0.05

    def test_bursts_detected_and_monotone_in_snr(self):
        rng = np.random.default_rng(11)
        rates = []
        for snr in (0.0, 10.0, 20.0):
            x, burst = burst_signal(rng, snr)
            frames = frames_of(x)
            decisions = SohnDetector().predict(frames)
            truth = burst_frame_truth(burst, frames.num_frames)
            rates.append(decisions[truth].mean())
        assert rates[1] >= 0.9
        assert rates[0] <= rates[1] + 1e-12 <= rates[2] + 2e-12

    def test_deterministic(self):
        rng = np.random.default_rng(13)
        x, _ = burst_signal(rng, 10.0)
        frames = frames_of(x)
        det = SohnDetector()
        np.testing.assert_array_equal(det.predict(frames), det.predict(frames))

    def test_mask_wrapper(self):
        rng = np.random.default_rng(15)
        frames = frames_of(0.05 * rng.standard_normal(SR * 2))
        mask = SohnDetector().mask(frames)
        assert len(mask) == frames.num_frames
        assert mask.spec == SPEC
