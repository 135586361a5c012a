"""Two-Gaussian modeling of per-frame log-energies.

The dB energies of an utterance are modeled with a 2-component mixture; the
low-mean component is background, the high-mean component speech, and the
decision threshold is the point between the two centers where the weighted
component densities are equal.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ..audio import frame_energy
from ..errors import DegenerateModelWarning, FitError
from ..gmm import DiagonalGmm, em_train
from ..validation import as_float_array
from .base import FrameDetector

VARIANCE_FLOOR_DB2 = 1e-4
THRESHOLD_TOL_DB = 1e-6
MIN_FRAMES = 10
INIT_PERCENTILES = (10.0, 90.0)


@dataclass(frozen=True)
class BiGaussianModel:
    """Fitted 2-mixture of log-energies; component 1 is the low-mean (noise) one."""

    w1: float
    w2: float
    mu1: float
    mu2: float
    var1: float
    var2: float
    theta: float

    def __post_init__(self):
        if abs(self.w1 + self.w2 - 1.0) > 1e-9:
            raise ValueError("component weights must sum to 1")
        if self.var1 <= 0 or self.var2 <= 0:
            raise ValueError("component variances must be positive")
        if self.mu1 > self.mu2:
            raise ValueError("components must be ordered with mu1 <= mu2")
        if not self.mu1 <= self.theta <= self.mu2:
            raise ValueError("threshold must lie between the component means")

    def density_gap(self, x: float) -> float:
        """w1*N(x; mu1, var1) - w2*N(x; mu2, var2); zero at the threshold."""
        return self.w1 * _normal_pdf(x, self.mu1, self.var1) - self.w2 * _normal_pdf(
            x, self.mu2, self.var2
        )


def _normal_pdf(x, mean, var):
    return np.exp(-0.5 * (x - mean) ** 2 / var) / np.sqrt(2.0 * np.pi * var)


def equal_probability_threshold(
    w1: float, mu1: float, var1: float, w2: float, mu2: float, var2: float
) -> float:
    """Crossing of the weighted component densities inside (mu1, mu2).

    A sign change is bracketed on a dense grid and refined by bisection to
    well below ``THRESHOLD_TOL_DB``.  If the densities never cross inside the
    interval (extreme weight imbalance) the endpoint with the smaller gap is
    returned and flagged as degenerate.
    """
    if mu2 < mu1:
        raise ValueError("means must be ordered (mu1 <= mu2)")
    if mu2 - mu1 < 1e-9:
        return mu1

    def gap(x):
        return w1 * _normal_pdf(x, mu1, var1) - w2 * _normal_pdf(x, mu2, var2)

    grid = np.linspace(mu1, mu2, 4096)
    values = gap(grid)
    signs = np.sign(values)
    crossings = np.flatnonzero(signs[:-1] * signs[1:] < 0)
    if crossings.size == 0:
        exact = np.flatnonzero(signs == 0)
        if exact.size:
            return float(grid[exact[0]])
        warnings.warn(
            "component densities do not cross between the means; using the closest endpoint",
            DegenerateModelWarning,
            stacklevel=2,
        )
        return float(grid[np.argmin(np.abs(values))])
    lo, hi = grid[crossings[0]], grid[crossings[0] + 1]
    return float(brentq(gap, lo, hi, xtol=THRESHOLD_TOL_DB * 1e-2))


def _initial_model(log_energies: np.ndarray, jitter: float = 0.0) -> DiagonalGmm:
    lo, hi = np.percentile(log_energies, INIT_PERCENTILES)
    var = max(float(log_energies.var()), VARIANCE_FLOOR_DB2)
    spread = 0.0 if jitter == 0.0 else jitter * np.sqrt(var)
    means = np.array([[lo - spread], [hi + spread]])
    return DiagonalGmm.from_parameters(
        np.array([0.5, 0.5]), means, np.full((2, 1), var)
    )


def fit_bigaussian(
    log_energies,
    max_iters: int = 100,
    tol: float = 1e-6,
    variance_floor: float = VARIANCE_FLOOR_DB2,
) -> BiGaussianModel:
    """Fit the 2-mixture by EM and place the threshold at the density crossing.

    Initialization is deterministic: means at the 10th and 90th percentiles,
    equal weights, variances at the sample variance.  A collapsed fit (a
    component starved of weight or pinned at the variance floor) is retried
    once from a perturbed initialization before giving up.
    """
    x = as_float_array(log_energies, "log_energies", ndim=1)
    if x.size < MIN_FRAMES:
        raise FitError(f"need at least {MIN_FRAMES} frames, got {x.size}")
    if x.var() <= 0.0:
        raise FitError("log-energies have zero variance; nothing to separate")
    data = x[:, None]

    model = None
    for attempt, jitter in enumerate((0.0, 0.5)):
        candidate, _ = em_train(
            _initial_model(x, jitter=jitter),
            data,
            max_iters=max_iters,
            tol=tol,
            floor=variance_floor,
        )
        if _is_collapsed(candidate, variance_floor):
            if attempt == 0:
                continue
            raise FitError("EM collapsed twice while fitting the two-mixture energy model")
        model = candidate
        break
    if model is None:
        raise FitError("EM collapsed twice while fitting the two-mixture energy model")

    order = np.argsort(model.means_[:, 0])
    w1, w2 = model.weights_[order]
    mu1, mu2 = model.means_[order, 0]
    var1, var2 = model.variances_[order, 0]
    if mu2 - mu1 < 1e-9:
        warnings.warn(
            "fitted component means coincide; threshold degenerates to the common mean",
            DegenerateModelWarning,
            stacklevel=2,
        )
    theta = equal_probability_threshold(w1, mu1, var1, w2, mu2, var2)
    theta = float(min(max(theta, mu1), mu2))
    return BiGaussianModel(
        w1=float(w1), w2=float(w2), mu1=float(mu1), mu2=float(mu2),
        var1=float(var1), var2=float(var2), theta=theta,
    )


def _is_collapsed(model: DiagonalGmm, floor: float) -> bool:
    # a starved component is a collapsed fit; a variance pinned at the floor is
    # fine (that is what the floor is for, e.g. a digital-silence point mass)
    if not np.all(np.isfinite(model.weights_)) or not np.all(np.isfinite(model.means_)):
        return True
    return bool(np.any(model.weights_ < 1e-4))


def bigaussian_mask(log_energies, **fit_kwargs) -> tuple[np.ndarray, BiGaussianModel]:
    """Label frames above the fitted threshold as speech."""
    x = as_float_array(log_energies, "log_energies", ndim=1)
    model = fit_bigaussian(x, **fit_kwargs)
    return x > model.theta, model


class BiGaussianDetector(FrameDetector):
    """Utterance-wise two-Gaussian log-energy detector.

    The mixture is re-estimated for every utterance inside :meth:`predict`;
    the most recent fit is kept on ``model_`` for inspection.
    """

    def __init__(
        self,
        max_iters: int = 100,
        tol: float = 1e-6,
        variance_floor: float = VARIANCE_FLOOR_DB2,
    ):
        self.max_iters = max_iters
        self.tol = tol
        self.variance_floor = variance_floor

    def predict(self, frames) -> np.ndarray:
        _, energies_db = frame_energy(frames)
        decisions, self.model_ = bigaussian_mask(
            energies_db,
            max_iters=self.max_iters,
            tol=self.tol,
            variance_floor=self.variance_floor,
        )
        return decisions
