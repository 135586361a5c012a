"""Waveform I/O, framing, and short-time parameters shared by every detector.

Energy is reported both linearly (sum of squares per frame) and in dB with a
floor of ``ENERGY_EPS`` so all-zero frames map to -120 dB instead of -inf.
"""

from __future__ import annotations

import contextlib
import wave
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    AudioFormatError,
    BitDepthError,
    ChannelCountError,
    FramingError,
    HeadroomWarning,
)
from .validation import check_frames

ENERGY_EPS = 1e-12
PCM_SCALE = 32768.0

WINDOW_TYPES = ("rectangular", "hamming")


@dataclass(frozen=True, eq=False)
class Waveform:
    """Mono audio signal with amplitudes nominally in [-1, 1]."""

    samples: np.ndarray
    sample_rate: int
    id: str = ""

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1 or samples.size == 0:
            raise ValueError("waveform samples must be a non-empty 1-D array")
        if not np.all(np.isfinite(samples)):
            raise ValueError("waveform samples must be finite")
        if int(self.sample_rate) <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate


@dataclass(frozen=True)
class FramingSpec:
    """Frame geometry: 20 ms frames with a 10 ms hop by default."""

    frame_len_ms: float = 20.0
    hop_ms: float = 10.0
    window: str = "rectangular"

    def __post_init__(self):
        if not 0 < self.hop_ms <= self.frame_len_ms:
            raise ValueError(
                f"need 0 < hop_ms <= frame_len_ms, got hop={self.hop_ms}, frame={self.frame_len_ms}"
            )
        if self.window not in WINDOW_TYPES:
            raise ValueError(f"window must be one of {WINDOW_TYPES}, got {self.window!r}")

    def frame_len(self, sample_rate: int) -> int:
        n = int(round(self.frame_len_ms * sample_rate / 1000.0))
        if n < 1:
            raise ValueError(f"frame length is below one sample at {sample_rate} Hz")
        return n

    def hop(self, sample_rate: int) -> int:
        return max(1, int(round(self.hop_ms * sample_rate / 1000.0)))

    def window_values(self, frame_len: int) -> np.ndarray:
        if self.window == "hamming":
            return np.hamming(frame_len)
        return np.ones(frame_len)


@dataclass(eq=False)
class FrameSequence:
    """Windowed frames of one utterance plus the geometry that produced them."""

    frames: np.ndarray
    spec: FramingSpec
    sample_rate: int
    source_id: str = ""

    @property
    def num_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def frame_len(self) -> int:
        return self.frames.shape[1]


def num_frames(signal_len: int, frame_len: int, hop: int) -> int:
    """Frame count for a signal of ``signal_len`` samples; 0 if too short."""
    if signal_len < frame_len:
        return 0
    return (signal_len - frame_len) // hop + 1


def read_wav(path) -> Waveform:
    """Read a mono 16-bit PCM RIFF file, scaling samples by 1/32768."""
    path = Path(path)
    try:
        handle = wave.open(str(path), "rb")
    except (wave.Error, EOFError) as exc:
        raise AudioFormatError(f"{path}: not a readable PCM WAV file ({exc})") from exc
    with contextlib.closing(handle) as wav:
        n_channels = wav.getnchannels()
        samp_width = wav.getsampwidth()
        sample_rate = wav.getframerate()
        if n_channels != 1:
            raise ChannelCountError(f"{path}: expected mono, got {n_channels} channels")
        if samp_width != 2:
            raise BitDepthError(f"{path}: expected 16-bit PCM, got {8 * samp_width}-bit")
        raw = wav.readframes(wav.getnframes())
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / PCM_SCALE
    if samples.size == 0:
        raise AudioFormatError(f"{path}: file contains no samples")
    return Waveform(samples=samples, sample_rate=sample_rate, id=path.stem)


def write_wav(path, waveform: Waveform) -> None:
    """Write 16-bit PCM; samples outside [-1, 1) are clipped with a warning."""
    scaled = np.round(waveform.samples * PCM_SCALE)
    if scaled.max(initial=0.0) > PCM_SCALE - 1 or scaled.min(initial=0.0) < -PCM_SCALE:
        warnings.warn(
            f"{waveform.id or path}: samples exceed 16-bit range and will be clipped",
            HeadroomWarning,
            stacklevel=2,
        )
    pcm = np.clip(scaled, -PCM_SCALE, PCM_SCALE - 1).astype("<i2")
    with contextlib.closing(wave.open(str(path), "wb")) as wav:
        wav.setnchannels(1)
        wav.setsampwidth(2)
        wav.setframerate(waveform.sample_rate)
        wav.writeframes(pcm.tobytes())


def frame_signal(waveform: Waveform, spec: FramingSpec) -> FrameSequence:
    """Slice into windowed frames; the trailing partial frame is discarded."""
    frame_len = spec.frame_len(waveform.sample_rate)
    hop = spec.hop(waveform.sample_rate)
    x = waveform.samples
    if x.size < frame_len:
        raise FramingError(
            f"signal of {x.size} samples is shorter than one {frame_len}-sample frame"
        )
    frames = np.lib.stride_tricks.sliding_window_view(x, frame_len)[::hop]
    frames = frames * spec.window_values(frame_len)
    return FrameSequence(
        frames=frames,
        spec=spec,
        sample_rate=waveform.sample_rate,
        source_id=waveform.id,
    )


def _frame_matrix(frames) -> np.ndarray:
    if isinstance(frames, FrameSequence):
        return frames.frames
    return check_frames(frames)


def frame_energy(frames) -> tuple[np.ndarray, np.ndarray]:
    """Per-frame linear energy (sum of squares) and dB energy with -120 dB floor."""
    x = _frame_matrix(frames)
    energy = np.sum(x * x, axis=1)
    energy_db = 10.0 * np.log10(energy + ENERGY_EPS)
    return energy, energy_db


def zero_crossing_rate(frames) -> np.ndarray:
    """Fraction of adjacent-sample sign changes per frame; zeros count as positive."""
    x = _frame_matrix(frames)
    if x.shape[1] < 2:
        raise ValueError("zero-crossing rate needs frames of at least 2 samples")
    signs = np.where(x >= 0.0, 1.0, -1.0)
    changes = np.sum(signs[:, 1:] != signs[:, :-1], axis=1)
    return changes / (x.shape[1] - 1)


def avg_magnitude_spectrum(waveform: Waveform, spec: FramingSpec, nfft: int) -> np.ndarray:
    """Mean |DFT| over all frames; length nfft // 2 + 1."""
    frames = frame_signal(waveform, spec)
    if nfft < frames.frame_len:
        raise ValueError(f"nfft={nfft} is smaller than the frame length {frames.frame_len}")
    return np.abs(np.fft.rfft(frames.frames, n=nfft, axis=1)).mean(axis=0)
