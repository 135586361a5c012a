"""Energy-thresholded detectors: average-relative and maximum-relative."""

from __future__ import annotations

import numpy as np

from ..audio import frame_energy
from ..validation import as_float_array
from .base import FrameDetector

AVERAGE_ENERGY_FACTOR = 0.06
DEFAULT_MAX_MARGIN_DB = 30.0


def average_energy_mask(energies, threshold_factor: float = AVERAGE_ENERGY_FACTOR) -> np.ndarray:
    """Speech iff linear frame energy strictly exceeds ``factor * mean(E)``."""
    energies = as_float_array(energies, "energies", ndim=1)
    if energies.size == 0:
        raise ValueError("energies must not be empty")
    return energies > threshold_factor * energies.mean()


def max_energy_mask(energies_db, margin_db: float = DEFAULT_MAX_MARGIN_DB) -> np.ndarray:
    """Speech iff dB frame energy is within ``margin_db`` of the utterance maximum."""
    energies_db = as_float_array(energies_db, "energies_db", ndim=1)
    if energies_db.size == 0:
        raise ValueError("energies_db must not be empty")
    return energies_db >= energies_db.max() - margin_db


class AverageEnergyDetector(FrameDetector):
    """Thresholds linear frame energies at a fraction of their mean."""

    def __init__(self, threshold_factor: float = AVERAGE_ENERGY_FACTOR):
        self.threshold_factor = threshold_factor

    def predict(self, frames) -> np.ndarray:
        energies, _ = frame_energy(frames)
        return average_energy_mask(energies, self.threshold_factor)


class MaxEnergyDetector(FrameDetector):
    """Thresholds dB frame energies relative to the per-utterance maximum."""

    def __init__(self, margin_db: float = DEFAULT_MAX_MARGIN_DB):
        self.margin_db = margin_db

    def predict(self, frames) -> np.ndarray:
        _, energies_db = frame_energy(frames)
        return max_energy_mask(energies_db, self.margin_db)
