"""Small input-validation helpers used by the estimator classes."""

from __future__ import annotations

import numpy as np


def as_float_array(x, name: str, ndim: int | None = None, require_finite: bool = True) -> np.ndarray:
    """Coerce to a float64 ndarray, optionally checking rank and finiteness."""
    arr = np.asarray(x, dtype=np.float64)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if require_finite and arr.size and not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_frames(x, name: str = "frames") -> np.ndarray:
    """Validate a (num_frames, frame_len) matrix and return it as float64."""
    arr = as_float_array(x, name, ndim=2)
    if arr.shape[0] == 0:
        raise ValueError(f"{name} is empty")
    return arr


def check_positive(value: float, name: str) -> float:
    value = float(value)
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return value
