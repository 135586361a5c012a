"""Linear prediction and line spectral frequencies for the codec-style detector."""

from __future__ import annotations

import numpy as np

from ..validation import as_float_array

# Small white-noise correction keeps the autocorrelation matrix well conditioned
# on near-silent frames.
WHITE_NOISE_CORRECTION = 1.0001


def autocorrelation(frame: np.ndarray, order: int) -> np.ndarray:
    """Biased autocorrelation r[0..order] of one frame."""
    frame = as_float_array(frame, "frame", ndim=1)
    if frame.size <= order:
        raise ValueError(f"frame of {frame.size} samples is too short for order {order}")
    r = np.empty(order + 1)
    for lag in range(order + 1):
        r[lag] = float(np.dot(frame[: frame.size - lag], frame[lag:]))
    return r


def levinson_durbin(r: np.ndarray, order: int) -> tuple[np.ndarray, float]:
    """Solve the normal equations; returns (lpc coefficients a[0..order], residual).

    ``a[0]`` is 1 and the predictor is ``x[n] ~ -sum(a[k] x[n-k])``.  A
    non-positive residual anywhere in the recursion signals a degenerate
    frame and raises ``FloatingPointError``.
    """
    r = as_float_array(r, "r", ndim=1)
    a = np.zeros(order + 1)
    a[0] = 1.0
    error = float(r[0])
    if error <= 0.0:
        raise FloatingPointError("zero-energy frame: autocorrelation r[0] <= 0")
    for i in range(1, order + 1):
        acc = r[i] + float(np.dot(a[1:i], r[i - 1 : 0 : -1]))
        k = -acc / error
        a[1 : i + 1] = a[1 : i + 1] + k * a[i - 1 :: -1][: i]
        a[i] = k
        error *= 1.0 - k * k
        if error <= 0.0:
            raise FloatingPointError(f"Levinson recursion became singular at order {i}")
    return a, error


def lpc_coefficients(frame: np.ndarray, order: int = 10) -> np.ndarray:
    """LPC polynomial of one frame via the autocorrelation method."""
    r = autocorrelation(frame, order)
    r[0] *= WHITE_NOISE_CORRECTION
    r[0] += 1e-12
    a, _ = levinson_durbin(r, order)
    return a


def uniform_lsf(order: int) -> np.ndarray:
    """Fallback LSF grid for degenerate frames: evenly spaced in (0, pi)."""
    return np.arange(1, order + 1) * np.pi / (order + 1)


def lsf_from_lpc(a: np.ndarray) -> np.ndarray:
    """Line spectral frequencies in (0, pi) from an LPC polynomial.

    Roots of the sum and difference polynomials P(z) = A(z) + z^-(p+1) A(1/z)
    and Q(z) = A(z) - z^-(p+1) A(1/z) are found after deflating the trivial
    roots at z = -1 and z = +1.  Requires even order.  Falls back to the
    uniform grid if the roots do not land on the unit circle.
    """
    a = as_float_array(a, "a", ndim=1)
    order = a.size - 1
    if order % 2 != 0:
        raise ValueError(f"LSF computation expects an even LPC order, got {order}")
    ext = np.concatenate([a, [0.0]])
    p = ext + ext[::-1]
    q = ext - ext[::-1]
    p_deflated, _ = np.polydiv(p, np.array([1.0, 1.0]))
    q_deflated, _ = np.polydiv(q, np.array([1.0, -1.0]))

    angles = []
    for poly in (p_deflated, q_deflated):
        roots = np.roots(poly)
        # keep one of each conjugate pair
        upper = roots[roots.imag >= 0.0]
        if np.any(np.abs(np.abs(upper) - 1.0) > 0.05):
            return uniform_lsf(order)
        angles.extend(np.angle(upper).tolist())
    lsf = np.sort(np.asarray(angles))
    lsf = lsf[(lsf > 1e-6) & (lsf < np.pi - 1e-6)]
    if lsf.size != order:
        return uniform_lsf(order)
    return lsf


def frame_lsf(frame: np.ndarray, order: int = 10) -> np.ndarray:
    """LSF vector of one frame; degenerate frames get the uniform grid."""
    try:
        a = lpc_coefficients(frame, order)
    except FloatingPointError:
        return uniform_lsf(order)
    if not np.all(np.isfinite(a)):
        return uniform_lsf(order)
    return lsf_from_lpc(a)
