"""Common detector interface: every detector maps frames to a boolean mask."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from ..audio import FrameSequence, FramingSpec
from .mask import SpeechMask


class FrameDetector(BaseEstimator):
    """Base class for frame-level speech activity detectors.

    Detectors are stateless across utterances: any per-utterance model
    estimation happens inside :meth:`predict`.  ``predict`` accepts a
    :class:`FrameSequence` (or a plain frames matrix where the detector does
    not need the sample rate) and returns one boolean per frame.
    """

    def fit(self, X=None, y=None):
        return self

    def predict(self, frames) -> np.ndarray:
        raise NotImplementedError

    def mask(self, frames: FrameSequence) -> SpeechMask:
        """Run the detector and wrap the decisions with the framing metadata."""
        decisions = self.predict(frames)
        spec = frames.spec if isinstance(frames, FrameSequence) else FramingSpec()
        source_id = frames.source_id if isinstance(frames, FrameSequence) else ""
        return SpeechMask(decisions=decisions, spec=spec, source_id=source_id)


class AllSpeechDetector(FrameDetector):
    """Pass-through detector: every frame is speech (the no-SAD baseline)."""

    def predict(self, frames) -> np.ndarray:
        x = frames.frames if isinstance(frames, FrameSequence) else np.asarray(frames)
        return np.ones(x.shape[0], dtype=bool)
