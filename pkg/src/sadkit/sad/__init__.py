"""Speech activity detectors sharing a common frames-in, mask-out interface."""

from .base import AllSpeechDetector, FrameDetector
from .bigaussian import (
    BiGaussianDetector,
    BiGaussianModel,
    bigaussian_mask,
    equal_probability_threshold,
    fit_bigaussian,
)
from .energy import (
    AverageEnergyDetector,
    MaxEnergyDetector,
    average_energy_mask,
    max_energy_mask,
)
from .g729b import DEFAULT_BOUNDARIES, G729BDetector, multiboundary_decision
from .mask import SpeechMask, apply_mask, decode_runs, encode_runs, load_masks, save_masks
from .sohn import SohnDetector, apply_hangover, log_likelihood_ratio

# Method names follow the abbreviations used on the experiment configs.
DETECTORS = {
    "g729b": G729BDetector,
    "smsad": SohnDetector,
    "mebts": MaxEnergyDetector,
    "aebts": AverageEnergyDetector,
    "ubgme": BiGaussianDetector,
    "none": AllSpeechDetector,
}


def make_detector(method: str, **params) -> FrameDetector:
    """Instantiate a detector by its method name, with parameter overrides."""
    try:
        cls = DETECTORS[method]
    except KeyError:
        raise ValueError(
            f"unknown SAD method {method!r}; expected one of {sorted(DETECTORS)}"
        ) from None
    return cls(**params)


__all__ = [
    "AllSpeechDetector",
    "AverageEnergyDetector",
    "BiGaussianDetector",
    "BiGaussianModel",
    "DEFAULT_BOUNDARIES",
    "DETECTORS",
    "FrameDetector",
    "G729BDetector",
    "MaxEnergyDetector",
    "SohnDetector",
    "SpeechMask",
    "apply_hangover",
    "apply_mask",
    "average_energy_mask",
    "bigaussian_mask",
    "decode_runs",
    "encode_runs",
    "equal_probability_threshold",
    "fit_bigaussian",
    "load_masks",
    "log_likelihood_ratio",
    "make_detector",
    "max_energy_mask",
    "multiboundary_decision",
    "save_masks",
]
