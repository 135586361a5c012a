"""MFCC extraction: 20 mel filters, 20 ms frames with 50% overlap, and velocity
coefficients for a 38-dimensional vector under the defaults (c1..c19 + deltas).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np
from scipy.fft import dct
from sklearn.base import BaseEstimator, TransformerMixin

from .audio import FrameSequence, FramingSpec, Waveform, frame_signal
from .validation import as_float_array, check_frames

FILTERBANK_FLOOR = 1e-10
FEATURE_MAGIC = b"SFEA"


def mel_scale(freq_hz) -> np.ndarray:
    """Hz to mel: 2595 * log10(1 + f / 700)."""
    return 2595.0 * np.log10(1.0 + np.asarray(freq_hz, dtype=np.float64) / 700.0)


def inverse_mel(mel) -> np.ndarray:
    return 700.0 * (10.0 ** (np.asarray(mel, dtype=np.float64) / 2595.0) - 1.0)


@dataclass(frozen=True)
class MfccConfig:
    n_mel_filters: int = 20
    n_ceps: int = 19
    delta_window: int = 2
    nfft: int = 256
    preemphasis: float = 0.97

    def __post_init__(self):
        if not self.n_ceps < self.n_mel_filters:
            raise ValueError("n_ceps must be smaller than n_mel_filters")
        if self.delta_window < 1:
            raise ValueError("delta_window must be at least 1")


def mel_filterbank(config: MfccConfig, sample_rate: int) -> np.ndarray:
    """Triangular filters with centers uniformly spaced on the mel axis.

    Filter edges run from 0 Hz to the Nyquist frequency; adjacent filters
    overlap so every filter's right edge is its successor's center.
    """
    n_bins = config.nfft // 2 + 1
    edges_mel = np.linspace(0.0, float(mel_scale(sample_rate / 2.0)), config.n_mel_filters + 2)
    edges_hz = inverse_mel(edges_mel)
    bin_freqs = np.fft.rfftfreq(config.nfft, 1.0 / sample_rate)

    bank = np.zeros((config.n_mel_filters, n_bins))
    for i in range(config.n_mel_filters):
        left, center, right = edges_hz[i], edges_hz[i + 1], edges_hz[i + 2]
        rising = (bin_freqs - left) / (center - left)
        falling = (right - bin_freqs) / (right - center)
        bank[i] = np.maximum(0.0, np.minimum(rising, falling))
    if np.any(bank.sum(axis=1) <= 0.0):
        raise ValueError(
            f"nfft={config.nfft} cannot resolve {config.n_mel_filters} mel filters "
            f"at {sample_rate} Hz"
        )
    return bank


def preemphasize(samples: np.ndarray, coeff: float) -> np.ndarray:
    """First-order high-pass y[n] = x[n] - coeff * x[n-1]; keeps the length."""
    x = as_float_array(samples, "samples", ndim=1)
    if coeff <= 0.0:
        return x.copy()
    return np.concatenate([x[:1], x[1:] - coeff * x[:-1]])


def extract_mfcc(frames, config: MfccConfig, sample_rate: int | None = None) -> np.ndarray:
    """Static cepstra c1..c_n from pre-emphasized, Hamming-windowed frames."""
    if isinstance(frames, FrameSequence):
        matrix = frames.frames
        sample_rate = frames.sample_rate
    else:
        matrix = check_frames(frames)
        if sample_rate is None:
            raise ValueError("sample_rate is required when passing a bare frame matrix")
    bank = mel_filterbank(config, sample_rate)
    power = np.abs(np.fft.rfft(matrix, n=config.nfft, axis=1)) ** 2
    filter_energies = np.maximum(power @ bank.T, FILTERBANK_FLOOR)
    log_energies = np.log(filter_energies)
    cepstra = dct(log_energies, type=2, norm="ortho", axis=1)
    return cepstra[:, 1 : config.n_ceps + 1]


def append_deltas(static: np.ndarray, delta_window: int = 2) -> np.ndarray:
    """Concatenate regression-slope deltas; edges are handled by replication."""
    static = check_frames(static, "static features")
    w = int(delta_window)
    if static.shape[0] < 2 * w + 1:
        raise ValueError(
            f"need at least {2 * w + 1} frames for delta window {w}, got {static.shape[0]}"
        )
    padded = np.concatenate([np.repeat(static[:1], w, axis=0), static, np.repeat(static[-1:], w, axis=0)])
    denom = 2.0 * sum(k * k for k in range(1, w + 1))
    deltas = np.zeros_like(static)
    for k in range(1, w + 1):
        deltas += k * (padded[w + k : w + k + static.shape[0]] - padded[w - k : w - k + static.shape[0]])
    deltas /= denom
    return np.concatenate([static, deltas], axis=1)


def cmvn(features: np.ndarray, variance_floor: float = 1e-12) -> np.ndarray:
    """Per-dimension zero mean and unit variance over the retained frames."""
    x = check_frames(features, "features")
    if x.shape[0] < 2:
        raise ValueError("cmvn needs at least 2 frames")
    mean = x.mean(axis=0)
    std = np.sqrt(np.maximum(x.var(axis=0), variance_floor))
    return (x - mean) / std


@dataclass(eq=False)
class FeatureMatrix:
    """Per-frame feature vectors of one utterance."""

    vectors: np.ndarray
    source_id: str = ""

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def num_frames(self) -> int:
        return self.vectors.shape[0]


class MfccExtractor(BaseEstimator, TransformerMixin):
    """Waveform-to-features transformer: pre-emphasis, Hamming framing, MFCC,
    and velocity coefficients.

    ``transform`` accepts a single :class:`Waveform` and returns a
    :class:`FeatureMatrix` of dimension ``2 * n_ceps`` (38 by default).
    """

    def __init__(
        self,
        frame_len_ms: float = 20.0,
        hop_ms: float = 10.0,
        n_mel_filters: int = 20,
        n_ceps: int = 19,
        delta_window: int = 2,
        nfft: int = 256,
        preemphasis: float = 0.97,
    ):
        self.frame_len_ms = frame_len_ms
        self.hop_ms = hop_ms
        self.n_mel_filters = n_mel_filters
        self.n_ceps = n_ceps
        self.delta_window = delta_window
        self.nfft = nfft
        self.preemphasis = preemphasis

    def fit(self, X=None, y=None):
        return self

    @property
    def config(self) -> MfccConfig:
        return MfccConfig(
            n_mel_filters=self.n_mel_filters,
            n_ceps=self.n_ceps,
            delta_window=self.delta_window,
            nfft=self.nfft,
            preemphasis=self.preemphasis,
        )

    def transform(self, waveform: Waveform) -> FeatureMatrix:
        emphasized = Waveform(
            samples=preemphasize(waveform.samples, self.preemphasis),
            sample_rate=waveform.sample_rate,
            id=waveform.id,
        )
        spec = FramingSpec(self.frame_len_ms, self.hop_ms, window="hamming")
        frames = frame_signal(emphasized, spec)
        static = extract_mfcc(frames, self.config)
        vectors = append_deltas(static, self.delta_window)
        return FeatureMatrix(vectors=vectors, source_id=waveform.id)


def save_features(features: FeatureMatrix, path) -> None:
    """Write the documented binary format: magic, dim, count, id, float32 rows."""
    payload = features.vectors.astype("<f4").tobytes()
    utt_id = features.source_id.encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(FEATURE_MAGIC)
        fh.write(struct.pack("<II", features.vectors.shape[1], features.vectors.shape[0]))
        fh.write(struct.pack("<H", len(utt_id)))
        fh.write(utt_id)
        fh.write(payload)


def load_features(path) -> FeatureMatrix:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != FEATURE_MAGIC:
            raise ValueError(f"{path}: not a feature file (magic {magic!r})")
        dim, count = struct.unpack("<II", fh.read(8))
        (id_len,) = struct.unpack("<H", fh.read(2))
        utt_id = fh.read(id_len).decode("utf-8")
        vectors = np.frombuffer(fh.read(4 * dim * count), dtype="<f4").reshape(count, dim)
    return FeatureMatrix(vectors=vectors.astype(np.float64), source_id=utt_id)
