"""Codec-style multi-parameter detector with four-pass decision smoothing.

Each frame yields four parameters: line spectral frequencies, full-band
energy, low-band (0-1 kHz) energy, and zero-crossing rate.  The leading
frames initialize running background averages; later frames are compared to
the background and declared active when the difference vector escapes a
piecewise-linear boundary region.  Four smoothing passes then enforce the
stationarity of speech and background: continuity extension, short-gap
bridging, short-burst deletion, and hangover extension.  Background averages
keep updating on inactive frames until a fixed update budget is spent.
"""

from __future__ import annotations

import numpy as np

from ..audio import ENERGY_EPS, FrameSequence
from ..errors import FramingError
from .base import FrameDetector
from .lpc import frame_lsf

# Boundary planes over the difference vector (sd, d_ef, d_el, d_zc) where
# sd    = sum of squared LSF deviations from the background (rad^2),
# d_ef  = background full-band energy minus frame full-band energy (dB),
# d_el  = same for the low band (dB),
# d_zc  = background ZCR minus frame ZCR.
# A frame is active when ANY plane fires: dot(coeffs, v) > threshold.
DEFAULT_BOUNDARIES: tuple[tuple[tuple[float, float, float, float], float], ...] = (
    # spectral distortion against zero-crossing shift
    ((1.0, 0.0, 0.0, 0.2), 0.12),
    ((1.0, 0.0, 0.0, -0.2), 0.10),
    ((1.0, 0.0, 0.0, 0.0), 0.16),
    # full-band energy rise against zero-crossing shift
    ((0.0, -1.0, 0.0, 10.0), 8.0),
    ((0.0, -1.0, 0.0, -10.0), 9.0),
    ((0.0, -1.0, 0.0, 0.0), 7.0),
    # energetic and spectrally distinct frames
    ((25.0, -1.0, 0.0, 0.0), 8.5),
    ((12.0, 0.0, -1.0, 0.0), 9.5),
    # low-band energy rise against zero-crossing shift
    ((0.0, 0.0, -1.0, 10.0), 9.0),
    ((0.0, 0.0, -1.0, -10.0), 10.0),
    ((0.0, 0.0, -1.0, 0.0), 8.0),
    # joint full/low band rise
    ((0.0, -0.6, -0.6, 0.0), 7.5),
    ((0.0, -1.0, 0.5, 0.0), 12.0),
    ((0.0, 0.5, -1.0, 0.0), 12.0),
)


def multiboundary_decision(diffs: np.ndarray, boundaries) -> np.ndarray:
    """Active where any linear inequality ``coeffs . v > threshold`` fires."""
    diffs = np.asarray(diffs, dtype=np.float64)
    active = np.zeros(diffs.shape[0], dtype=bool)
    for coeffs, threshold in boundaries:
        active |= diffs @ np.asarray(coeffs) > threshold
    return active


class G729BDetector(FrameDetector):
    """Multi-parameter detector in the style of the G.729 Annex B VAD.

    Parameters
    ----------
    n_init : leading frames treated as background (and labeled inactive).
    lpc_order : LPC order for the LSF parameters.
    nfft : FFT size for the low-band energy summation.
    low_band_hz : top of the low band.
    boundaries : decision planes; ``None`` selects ``DEFAULT_BOUNDARIES``.
    bkg_smoothing : recursive weight of the old background in each update.
    max_bkg_updates : background updates allowed before the estimate freezes.
    extend_margin_db : pass 1 keeps a frame active after an active frame while
        its full-band energy stays this far above the background.
    gap_fill_frames : pass 2 bridges inactive gaps up to this length.
    min_active_run : pass 3 deletes active runs shorter than this.
    hangover_frames : pass 4 extends every active run by this many frames.
    """

    def __init__(
        self,
        n_init: int = 32,
        lpc_order: int = 10,
        nfft: int = 256,
        low_band_hz: float = 1000.0,
        boundaries=None,
        bkg_smoothing: float = 0.95,
        max_bkg_updates: int = 128,
        extend_margin_db: float = 4.0,
        gap_fill_frames: int = 2,
        min_active_run: int = 2,
        hangover_frames: int = 4,
    ):
        self.n_init = n_init
        self.lpc_order = lpc_order
        self.nfft = nfft
        self.low_band_hz = low_band_hz
        self.boundaries = boundaries
        self.bkg_smoothing = bkg_smoothing
        self.max_bkg_updates = max_bkg_updates
        self.extend_margin_db = extend_margin_db
        self.gap_fill_frames = gap_fill_frames
        self.min_active_run = min_active_run
        self.hangover_frames = hangover_frames

    def _parameters(self, frames: FrameSequence):
        x = frames.frames
        energy_full = 10.0 * np.log10(np.sum(x * x, axis=1) + ENERGY_EPS)
        power = np.abs(np.fft.rfft(x, n=self.nfft, axis=1)) ** 2
        freqs = np.fft.rfftfreq(self.nfft, 1.0 / frames.sample_rate)
        low = freqs <= self.low_band_hz
        energy_low = 10.0 * np.log10(power[:, low].sum(axis=1) + ENERGY_EPS)
        signs = np.where(x >= 0.0, 1.0, -1.0)
        zcr = np.sum(signs[:, 1:] != signs[:, :-1], axis=1) / (x.shape[1] - 1)
        lsf = np.stack([frame_lsf(frame, self.lpc_order) for frame in x])
        return lsf, energy_full, energy_low, zcr

    def predict(self, frames) -> np.ndarray:
        if not isinstance(frames, FrameSequence):
            raise TypeError("G729BDetector needs a FrameSequence (sample rate required)")
        n = frames.num_frames
        if n < self.n_init:
            raise FramingError(
                f"need at least n_init={self.n_init} frames for background estimation, got {n}"
            )
        boundaries = self.boundaries if self.boundaries is not None else DEFAULT_BOUNDARIES
        lsf, e_full, e_low, zcr = self._parameters(frames)

        bkg_lsf = lsf[: self.n_init].mean(axis=0)
        bkg_ef = e_full[: self.n_init].mean()
        bkg_el = e_low[: self.n_init].mean()
        bkg_zc = zcr[: self.n_init].mean()

        beta = self.bkg_smoothing
        updates = 0
        raw = np.zeros(n, dtype=bool)
        d_ef_track = np.zeros(n)
        for i in range(self.n_init, n):
            sd = float(np.sum((lsf[i] - bkg_lsf) ** 2))
            d_ef = bkg_ef - e_full[i]
            d_el = bkg_el - e_low[i]
            d_zc = bkg_zc - zcr[i]
            d_ef_track[i] = d_ef
            raw[i] = bool(
                multiboundary_decision(np.array([[sd, d_ef, d_el, d_zc]]), boundaries)[0]
            )
            if not raw[i] and updates < self.max_bkg_updates:
                bkg_lsf = beta * bkg_lsf + (1.0 - beta) * lsf[i]
                bkg_ef = beta * bkg_ef + (1.0 - beta) * e_full[i]
                bkg_el = beta * bkg_el + (1.0 - beta) * e_low[i]
                bkg_zc = beta * bkg_zc + (1.0 - beta) * zcr[i]
                updates += 1
        return self._smooth(raw, d_ef_track)

    def _smooth(self, raw: np.ndarray, d_ef: np.ndarray) -> np.ndarray:
        # pass 1: continuity extension while energy stays above background
        out = raw.copy()
        for i in range(1, out.size):
            if not out[i] and out[i - 1] and d_ef[i] < -self.extend_margin_db:
                out[i] = True
        # pass 2: bridge short inactive gaps between active regions
        out = fill_short_gaps(out, self.gap_fill_frames)
        # pass 3: delete active runs shorter than the burst-deletion length
        out = delete_short_runs(out, self.min_active_run)
        # pass 4: hangover extension of every surviving active run
        for start, end in find_runs(out):
            out[end : min(end + self.hangover_frames, out.size)] = True
        return out


def find_runs(mask: np.ndarray):
    """(start, end) half-open index pairs of true runs."""
    padded = np.concatenate([[False], mask, [False]])
    edges = np.flatnonzero(np.diff(padded.astype(np.int8)))
    return list(zip(edges[0::2], edges[1::2]))


def fill_short_gaps(mask: np.ndarray, max_gap: int) -> np.ndarray:
    if max_gap <= 0:
        return mask
    out = mask.copy()
    runs = find_runs(mask)
    for (_, prev_end), (next_start, _) in zip(runs[:-1], runs[1:]):
        if next_start - prev_end <= max_gap:
            out[prev_end:next_start] = True
    return out


def delete_short_runs(mask: np.ndarray, min_run: int) -> np.ndarray:
    out = mask.copy()
    for start, end in find_runs(mask):
        if end - start < min_run:
            out[start:end] = False
    return out
