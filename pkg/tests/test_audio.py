import struct
import wave

import numpy as np
import pytest

from sadkit.audio import (
    FramingSpec,
    Waveform,
    avg_magnitude_spectrum,
    frame_energy,
    frame_signal,
    num_frames,
    read_wav,
    write_wav,
    zero_crossing_rate,
)
from sadkit.errors import AudioFormatError, BitDepthError, ChannelCountError, FramingError


def write_pcm(path, samples_int16, sample_rate=8000, channels=1, sampwidth=2):
    with wave.open(str(path), "wb") as fh:
        fh.setnchannels(channels)
        fh.setsampwidth(sampwidth)
        fh.setframerate(sample_rate)
        data = b"".join(struct.pack("<h", s) for s in samples_int16)
        if sampwidth == 1:
            data = bytes((s % 256 for s in samples_int16))
        fh.writeframes(data)


class TestReadWav:
    def test_sample_scaling(self, tmp_path):
        path = tmp_path / "a.wav"
        write_pcm(path, [16384, 0, -32768, 32767])
        w = read_wav(path)
        assert w.sample_rate == 8000
        np.testing.assert_allclose(w.samples, [0.5, 0.0, -1.0, 32767 / 32768])

    def test_stereo_rejected(self, tmp_path):
        path = tmp_path / "st.wav"
        write_pcm(path, [0, 0, 0, 0], channels=2)
        with pytest.raises(ChannelCountError):
            read_wav(path)

    def test_bit_depth_rejected(self, tmp_path):
        path = tmp_path / "b8.wav"
        write_pcm(path, [1, 2, 3], sampwidth=1)
        with pytest.raises(BitDepthError):
            read_wav(path)

    def test_malformed_header(self, tmp_path):
        path = tmp_path / "junk.wav"
        path.write_bytes(b"this is not RIFF data")
        with pytest.raises(AudioFormatError):
            read_wav(path)

    def test_roundtrip(self, tmp_path):
        rng = np.random.default_rng(0)
        w = Waveform(rng.uniform(-0.5, 0.5, 500), 8000, "rt")
        path = tmp_path / "rt.wav"
        write_wav(path, w)
        back = read_wav(path)
        np.testing.assert_allclose(back.samples, w.samples, atol=1.0 / 32768)


class TestFraming:
    def test_counts(self):
        w = Waveform(np.zeros(400), 8000)
        frames = frame_signal(w, FramingSpec(20.0, 10.0))
        assert frames.frames.shape == (4, 160)

    def test_single_frame(self):
        w = Waveform(np.zeros(160), 8000)
        assert frame_signal(w, FramingSpec(20.0, 20.0)).num_frames == 1

    def test_too_short(self):
        w = Waveform(np.zeros(159), 8000)
        with pytest.raises(FramingError):
            frame_signal(w, FramingSpec(20.0, 10.0))

    def test_count_formula_property(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            frame_len = int(rng.integers(2, 300))
            hop = int(rng.integers(1, frame_len + 1))
            n = int(rng.integers(frame_len, 5000))
            sr = 1000
            spec = FramingSpec(frame_len, hop)  # ms == samples at 1 kHz
            w = Waveform(rng.standard_normal(n), sr)
            frames = frame_signal(w, spec)
            assert frames.num_frames == (n - frame_len) // hop + 1
            assert frames.num_frames == num_frames(n, frame_len, hop)

    def test_frames_are_contiguous_slices(self):
        x = np.arange(400, dtype=float)
        frames = frame_signal(Waveform(x, 8000), FramingSpec(20.0, 10.0))
        np.testing.assert_array_equal(frames.frames[2], x[160:320])

    def test_bad_spec(self):
        with pytest.raises(ValueError):
            FramingSpec(20.0, 25.0)
        with pytest.raises(ValueError):
            FramingSpec(20.0, 10.0, window="hann")


class TestFrameEnergy:
    def test_ones(self):
        e, e_db = frame_energy(np.ones((1, 160)))
        assert e[0] == pytest.approx(160.0)
        assert e_db[0] == pytest.approx(10 * np.log10(160), abs=1e-6)

    def test_zero_frame_floor(self):
        e, e_db = frame_energy(np.zeros((1, 160)))
        assert e[0] == 0.0
        assert e_db[0] == pytest.approx(-120.0)

    def test_sparse(self):
        frame = np.zeros((1, 160))
        frame[0, 0], frame[0, 1] = 3.0, 4.0
        e, e_db = frame_energy(frame)
        assert e[0] == pytest.approx(25.0)
        assert e_db[0] == pytest.approx(10 * np.log10(25), abs=1e-6)

    def test_segment_energies_localized(self):
        # silence then speech: each frame's energy equals the segment it covers
        x = np.concatenate([np.zeros(320), 0.5 * np.ones(320)])
        frames = frame_signal(Waveform(x, 8000), FramingSpec(20.0, 20.0))
        e, _ = frame_energy(frames)
        np.testing.assert_allclose(e, [0.0, 0.0, 0.25 * 160, 0.25 * 160])


class TestZeroCrossingRate:
    def test_alternating(self):
        frame = np.tile([1.0, -1.0], 80)[None, :]
        assert zero_crossing_rate(frame)[0] == pytest.approx(1.0)

    def test_constant(self):
        assert zero_crossing_rate(np.ones((1, 160)))[0] == 0.0

    def test_small_example(self):
        assert zero_crossing_rate(np.array([[1.0, 1.0, -1.0, -1.0]]))[0] == pytest.approx(1 / 3)

    def test_zero_counts_positive(self):
        # [0, -1]: 0 is treated as positive, so one sign change
        assert zero_crossing_rate(np.array([[0.0, -1.0]]))[0] == 1.0
        assert zero_crossing_rate(np.array([[0.0, 1.0]]))[0] == 0.0

    def test_scale_invariance(self):
        rng = np.random.default_rng(2)
        frames = rng.standard_normal((10, 160))
        np.testing.assert_array_equal(
            zero_crossing_rate(frames), zero_crossing_rate(123.4 * frames)
        )


class TestAvgMagnitudeSpectrum:
    def test_dc_mass_in_bin_zero(self):
        w = Waveform(np.ones(480), 8000)
        mags = avg_magnitude_spectrum(w, FramingSpec(20.0, 10.0, "rectangular"), 160)
        assert mags[0] == pytest.approx(160.0)
        np.testing.assert_allclose(mags[1:], 0.0, atol=1e-9)

    def test_tone_at_bin_center(self):
        sr, nfft = 8000, 160
        k = 20  # bin center: 20 * 8000/160 = 1000 Hz
        t = np.arange(sr)
        x = np.sin(2 * np.pi * k / nfft * t)
        mags = avg_magnitude_spectrum(Waveform(x, sr), FramingSpec(20.0, 10.0), nfft)
        assert np.argmax(mags) == k

    def test_white_noise_flat(self):
        rng = np.random.default_rng(3)
        n_frames = 10_000
        x = rng.standard_normal(80 * (n_frames + 1) + 80)
        mags = avg_magnitude_spectrum(Waveform(x, 8000), FramingSpec(20.0, 10.0), 256)
        assert mags.std() / mags.mean() < 0.1

    def test_permutation_invariance(self):
        rng = np.random.default_rng(4)
        w = Waveform(rng.standard_normal(4000), 8000)
        frames = frame_signal(w, FramingSpec(20.0, 10.0, "hamming"))
        mags = avg_magnitude_spectrum(w, FramingSpec(20.0, 10.0, "hamming"), 256)
        shuffled = frames.frames[rng.permutation(frames.num_frames)]
        np.testing.assert_allclose(
            mags, np.abs(np.fft.rfft(shuffled, n=256, axis=1)).mean(axis=0), atol=1e-12
        )

    def test_nfft_too_small(self):
        w = Waveform(np.ones(480), 8000)
        with pytest.raises(ValueError):
            avg_magnitude_spectrum(w, FramingSpec(20.0, 10.0), 128)


class TestWaveform:
    def test_rejects_empty_and_nonfinite(self):
        with pytest.raises(ValueError):
            Waveform(np.array([]), 8000)
        with pytest.raises(ValueError):
            Waveform(np.array([np.nan]), 8000)
        with pytest.raises(ValueError):
            Waveform(np.zeros(5), 0)
