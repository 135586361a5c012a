import numpy as np
import pytest

from sadkit.audio import FramingSpec, Waveform, frame_signal
from sadkit.features import (
    FeatureMatrix,
    MfccConfig,
    MfccExtractor,
    append_deltas,
    cmvn,
    extract_mfcc,
    inverse_mel,
    load_features,
    mel_filterbank,
    mel_scale,
    preemphasize,
    save_features,
)

SR = 8000


class TestMelScale:
    def test_known_values(self):
        assert mel_scale(0.0) == 0.0
        assert mel_scale(700.0) == pytest.approx(2595.0 * np.log10(2.0), abs=1e-9)

    def test_roundtrip(self):
        freqs = np.linspace(0, 4000, 50)
        np.testing.assert_allclose(inverse_mel(mel_scale(freqs)), freqs, atol=1e-6)


class TestMelFilterbank:
    def test_shape_and_nonnegative(self):
        bank = mel_filterbank(MfccConfig(), SR)
        assert bank.shape == (20, 129)
        assert np.all(bank >= 0)

    def test_centers_strictly_increasing(self):
        bank = mel_filterbank(MfccConfig(), SR)
        centers = np.argmax(bank, axis=1)
        assert np.all(np.diff(centers) > 0)

    def test_nfft_too_small(self):
        with pytest.raises(ValueError):
            mel_filterbank(MfccConfig(nfft=32, n_mel_filters=20, n_ceps=19), 16000)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            MfccConfig(n_ceps=20, n_mel_filters=20)
        with pytest.raises(ValueError):
            MfccConfig(delta_window=0)


class TestExtractMfcc:
    def frames(self, x):
        return frame_signal(Waveform(x, SR, "u"), FramingSpec(20.0, 10.0, "hamming"))

    def test_identical_frames_identical_rows(self):
        rng = np.random.default_rng(0)
        frame = rng.standard_normal(160)
        x = np.tile(frame, 4)[: 160 * 3]
        static = extract_mfcc(np.vstack([frame, frame]), MfccConfig(), SR)
        np.testing.assert_array_equal(static[0], static[1])

    def test_scaling_lands_in_discarded_c0(self):
        rng = np.random.default_rng(1)
        x = 0.05 * rng.standard_normal(SR)
        base = extract_mfcc(self.frames(x), MfccConfig())
        scaled = extract_mfcc(self.frames(10.0 * x), MfccConfig())
        assert np.max(np.abs(base - scaled)) < 1e-9

    def test_flat_filterbank_gives_zero_cepstra(self):
        config = MfccConfig()
        bank = mel_filterbank(config, SR)
        # power spectrum with exactly equal filter outputs (minimum-norm solution)
        target = np.linalg.solve(bank @ bank.T, np.full(config.n_mel_filters, 10.0))
        power = np.maximum(bank.T @ target, 0.0)  # bins outside every filter are 0
        np.testing.assert_allclose(bank @ power, 10.0, atol=1e-9)
        frame = np.fft.irfft(np.sqrt(power), n=config.nfft)
        static = extract_mfcc(frame[None, :], config, SR)
        np.testing.assert_allclose(static, 0.0, atol=1e-9)

    def test_no_nan_on_random_waveforms(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            x = rng.uniform(-1, 1, int(rng.integers(400, 4000)))
            feats = MfccExtractor().transform(Waveform(x, SR, "f"))
            assert np.all(np.isfinite(feats.vectors))

    def test_silence_is_finite(self):
        feats = MfccExtractor().transform(Waveform(np.full(SR, 1e-30), SR, "z"))
        assert np.all(np.isfinite(feats.vectors))


class TestDeltas:
    def test_constant_track_zero_deltas(self):
        static = np.tile(np.arange(5.0), (9, 1))
        out = append_deltas(static, 2)
        np.testing.assert_allclose(out[:, 5:], 0.0, atol=1e-12)

    def test_linear_track_recovers_slope(self):
        slope = 0.37
        static = slope * np.arange(20.0)[:, None] * np.ones((1, 3))
        out = append_deltas(static, 2)
        np.testing.assert_allclose(out[2:-2, 3:], slope, atol=1e-12)

    def test_dim_doubles_to_38(self):
        static = np.random.default_rng(3).standard_normal((10, 19))
        assert append_deltas(static, 2).shape == (10, 38)

    def test_too_few_frames(self):
        with pytest.raises(ValueError):
            append_deltas(np.zeros((4, 3)), 2)


class TestCmvn:
    def test_zero_mean_unit_variance(self):
        rng = np.random.default_rng(4)
        x = rng.normal(3.0, 2.5, (200, 6))
        out = cmvn(x)
        np.testing.assert_allclose(out.mean(axis=0), 0.0, atol=1e-10)
        np.testing.assert_allclose(out.var(axis=0), 1.0, atol=1e-9)

    def test_idempotent(self):
        rng = np.random.default_rng(5)
        x = rng.normal(0, 3, (100, 4))
        once = cmvn(x)
        np.testing.assert_allclose(cmvn(once), once, atol=1e-9)

    def test_zero_variance_column_floored(self):
        x = np.column_stack([np.ones(50), np.random.default_rng(6).standard_normal(50)])
        out = cmvn(x)
        assert np.all(np.isfinite(out))


class TestExtractor:
    def test_default_dimension_is_38(self):
        rng = np.random.default_rng(7)
        feats = MfccExtractor().transform(Waveform(0.1 * rng.standard_normal(SR), SR, "u"))
        assert feats.dim == 38

    def test_deterministic(self):
        rng = np.random.default_rng(8)
        w = Waveform(0.1 * rng.standard_normal(SR), SR, "u")
        a = MfccExtractor().transform(w)
        b = MfccExtractor().transform(w)
        np.testing.assert_array_equal(a.vectors, b.vectors)

    def test_preemphasis_keeps_length(self):
        x = np.arange(10.0)
        y = preemphasize(x, 0.97)
        assert y.shape == x.shape
        assert y[0] == x[0]
        np.testing.assert_allclose(y[1:], x[1:] - 0.97 * x[:-1])

    def test_sklearn_params(self):
        ex = MfccExtractor(n_ceps=12)
        assert ex.get_params()["n_ceps"] == 12


class TestFeatureFile:
    def test_roundtrip(self, tmp_path):
        rng = np.random.default_rng(9)
        vectors = rng.standard_normal((17, 38)).astype(np.float32).astype(np.float64)
        fm = FeatureMatrix(vectors=vectors, source_id="utt-42")
        path = tmp_path / "utt.feat"
        save_features(fm, path)
        loaded = load_features(path)
        assert loaded.source_id == "utt-42"
        np.testing.assert_array_equal(loaded.vectors, vectors)

    def test_empty_matrix_roundtrip(self, tmp_path):
        fm = FeatureMatrix(vectors=np.zeros((0, 38)), source_id="empty")
        path = tmp_path / "e.feat"
        save_features(fm, path)
        loaded = load_features(path)
        assert loaded.vectors.shape == (0, 38)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "x.feat"
        path.write_bytes(b"NOPE" + b"\x00" * 16)
        with pytest.raises(ValueError):
            load_features(path)
