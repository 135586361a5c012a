"""Statistical likelihood-ratio detector with decision-directed SNR estimation.

Per frame and frequency bin, the a-posteriori SNR gamma = |X|^2 / noise_psd
and a decision-directed a-priori SNR estimate xi feed the per-bin log
likelihood ratio gamma*xi/(1+xi) - log(1+xi).  A frame is raw speech when the
mean log ratio over bins exceeds the decision threshold; the noise spectrum
is updated recursively on raw non-speech frames, and a hangover state machine
keeps frames speech-labeled for a fixed stretch after the last raw detection.
"""

from __future__ import annotations

import numpy as np

from ..audio import FrameSequence
from ..errors import FramingError
from ..validation import check_frames
from .base import FrameDetector

PSD_FLOOR = 1e-12


def log_likelihood_ratio(gamma, xi) -> np.ndarray:
    """Per-bin log likelihood ratio of speech presence over absence."""
    gamma = np.asarray(gamma, dtype=np.float64)
    xi = np.asarray(xi, dtype=np.float64)
    return gamma * xi / (1.0 + xi) - np.log1p(xi)


def apply_hangover(raw: np.ndarray, hangover_frames: int) -> np.ndarray:
    """Keep frames speech-labeled for ``hangover_frames`` after a raw detection."""
    raw = np.asarray(raw, dtype=bool)
    if hangover_frames <= 0:
        return raw.copy()
    out = raw.copy()
    last_hit = -(hangover_frames + 1)
    for i, value in enumerate(raw):
        if value:
            last_hit = i
        elif i - last_hit <= hangover_frames:
            out[i] = True
    return out


class SohnDetector(FrameDetector):
    """LRT detector with decision-directed estimation and hangover smoothing.

    Parameters
    ----------
    nfft : FFT size for the per-frame spectra.
    dd_alpha : decision-directed smoothing weight on the previous frame's
        estimated speech power.
    decision_threshold : log likelihood-ratio threshold on the per-bin mean.
    noise_update : recursive smoothing for the noise spectrum on non-speech
        frames, ``psd <- noise_update * psd + (1 - noise_update) * |X|^2``.
    n_init : leading frames assumed non-speech and averaged into the initial
        noise spectrum.
    hangover_frames : frames kept speech-labeled after the last raw detection.
    """

    def __init__(
        self,
        nfft: int = 256,
        dd_alpha: float = 0.99,
        decision_threshold: float = 0.15,
        noise_update: float = 0.98,
        n_init: int = 10,
        hangover_frames: int = 8,
    ):
        self.nfft = nfft
        self.dd_alpha = dd_alpha
        self.decision_threshold = decision_threshold
        self.noise_update = noise_update
        self.n_init = n_init
        self.hangover_frames = hangover_frames

    def predict(self, frames) -> np.ndarray:
        x = frames.frames if isinstance(frames, FrameSequence) else check_frames(frames)
        if x.shape[0] < self.n_init:
            raise FramingError(
                f"need at least n_init={self.n_init} frames for noise initialization, "
                f"got {x.shape[0]}"
            )
        if self.nfft < x.shape[1]:
            raise ValueError(f"nfft={self.nfft} is smaller than the frame length {x.shape[1]}")
        if not 0.0 < self.dd_alpha < 1.0:
            raise ValueError("dd_alpha must lie in (0, 1)")

        power = np.abs(np.fft.rfft(x, n=self.nfft, axis=1)) ** 2
        noise_psd = np.maximum(power[: self.n_init].mean(axis=0), PSD_FLOOR)

        alpha = self.dd_alpha
        raw = np.zeros(x.shape[0], dtype=bool)
        prev_speech_power = None
        for i in range(x.shape[0]):
            gamma = power[i] / noise_psd
            boosted = np.maximum(gamma - 1.0, 0.0)
            if prev_speech_power is None:
                xi = alpha + (1.0 - alpha) * boosted
            else:
                xi = alpha * prev_speech_power / noise_psd + (1.0 - alpha) * boosted
            statistic = float(np.mean(log_likelihood_ratio(gamma, xi)))
            raw[i] = statistic > self.decision_threshold
            if not raw[i]:
                noise_psd = np.maximum(
                    self.noise_update * noise_psd + (1.0 - self.noise_update) * power[i],
                    PSD_FLOOR,
                )
            # Wiener gain xi/(1+xi) gives the running speech-power estimate.
            gain = xi / (1.0 + xi)
            prev_speech_power = (gain ** 2) * power[i]
        return apply_hangover(raw, self.hangover_frames)
