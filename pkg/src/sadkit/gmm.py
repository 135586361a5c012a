"""Diagonal-covariance GMM estimation and scoring.

Training follows the classic GMM-UBM recipe: start from the global Gaussian,
repeatedly split every component and refine, then run EM to tolerance at the
final size.  Target models are derived from a trained background model by MAP
adaptation of the means only, and trials are scored with a fast top-C
likelihood ratio restricted per frame to the background model's best
components.
"""

from __future__ import annotations

import json
import struct
import warnings

import numpy as np
from scipy.special import logsumexp
from sklearn.base import BaseEstimator

from .errors import DataSizeWarning, FitError
from .validation import as_float_array

LOG_2PI = np.log(2.0 * np.pi)
MIN_VARIANCE_FLOOR = 1e-10
EMPTY_COMPONENT_COUNT = 1e-10

GMM_MAGIC = b"SGMM"
GMM_VERSION = 1


def _as_data(X) -> np.ndarray:
    X = as_float_array(X, "X")
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError(f"X must be a non-empty 2-D matrix, got shape {X.shape}")
    return X


def variance_floor(X: np.ndarray, factor: float) -> np.ndarray:
    """Per-dimension floor: ``factor`` times the global data variance."""
    floor = factor * X.var(axis=0)
    return np.maximum(floor, MIN_VARIANCE_FLOOR)


class DiagonalGmm(BaseEstimator):
    """Gaussian mixture with diagonal covariances and binary-split training.

    Parameters
    ----------
    n_components : mixture count; must be a power of two for ``fit``.
    tol : relative log-likelihood gain below which the final EM stage stops.
    max_iters : EM iteration cap for the final stage.
    split_em_iters : EM iterations run after each component split.
    variance_floor_factor : per-dimension variance floor as a fraction of the
        global data variance.
    seed : RNG seed for the split perturbations.

    Fitted attributes are ``weights_`` (M,), ``means_`` (M, D), ``variances_``
    (M, D) and ``loglik_path_``, a list of per-stage arrays of total data
    log-likelihoods recorded at each EM iteration.
    """

    def __init__(
        self,
        n_components: int = 256,
        tol: float = 1e-5,
        max_iters: int = 100,
        split_em_iters: int = 4,
        variance_floor_factor: float = 0.01,
        seed: int = 0,
        meta: dict | None = None,
    ):
        self.n_components = n_components
        self.tol = tol
        self.max_iters = max_iters
        self.split_em_iters = split_em_iters
        self.variance_floor_factor = variance_floor_factor
        self.seed = seed
        self.meta = meta

    @classmethod
    def from_parameters(cls, weights, means, variances, meta: dict | None = None) -> "DiagonalGmm":
        """Build a ready-to-score model from explicit parameters."""
        weights = as_float_array(weights, "weights", ndim=1)
        means = np.atleast_2d(as_float_array(means, "means"))
        variances = np.atleast_2d(as_float_array(variances, "variances"))
        if means.shape != variances.shape or means.shape[0] != weights.size:
            raise ValueError("weights, means and variances have inconsistent shapes")
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-9:
            raise ValueError("weights must be non-negative and sum to 1")
        if np.any(variances <= 0):
            raise ValueError("variances must be positive")
        model = cls(n_components=weights.size, meta=dict(meta) if meta else None)
        model.weights_ = weights.copy()
        model.means_ = means.copy()
        model.variances_ = variances.copy()
        model.n_features_ = means.shape[1]
        model.loglik_path_ = []
        return model

    def _replace(self, weights, means, variances) -> "DiagonalGmm":
        out = DiagonalGmm(**self.get_params())
        out.weights_ = weights
        out.means_ = means
        out.variances_ = variances
        out.n_features_ = means.shape[1]
        out.loglik_path_ = []
        return out

    # -- scoring ---------------------------------------------------------

    def component_log_densities(self, X) -> np.ndarray:
        """(N, M) matrix of log N(x_n; mu_m, diag var_m), without weights."""
        X = _as_data(X)
        if X.shape[1] != self.means_.shape[1]:
            raise ValueError(
                f"feature dim {X.shape[1]} does not match model dim {self.means_.shape[1]}"
            )
        inv_var = 1.0 / self.variances_
        const = -0.5 * (X.shape[1] * LOG_2PI + np.sum(np.log(self.variances_), axis=1))
        quad = (
            (X * X) @ inv_var.T
            - 2.0 * (X @ (self.means_ * inv_var).T)
            + np.sum(self.means_ ** 2 * inv_var, axis=1)
        )
        return const - 0.5 * quad

    def weighted_log_densities(self, X) -> np.ndarray:
        """(N, M) matrix of log(w_m N(x_n; ...)); rows logsumexp to the density."""
        return self.component_log_densities(X) + np.log(self.weights_)

    def score_samples(self, X) -> np.ndarray:
        """Per-frame log density under the mixture (log-sum-exp over components)."""
        return logsumexp(self.weighted_log_densities(X), axis=1)

    def responsibilities(self, X) -> np.ndarray:
        joint = self.weighted_log_densities(X)
        return np.exp(joint - logsumexp(joint, axis=1, keepdims=True))

    # -- training --------------------------------------------------------

    def fit(self, X, y=None) -> "DiagonalGmm":
        """Train by binary splitting: split every centroid, re-quantize with
        k-means, refine with a few EM iterations, and repeat until the target
        size; a final EM stage then runs to tolerance."""
        X = _as_data(X)
        m = int(self.n_components)
        if m < 1 or (m & (m - 1)) != 0:
            raise ValueError(f"n_components must be a power of two, got {m}")
        if X.shape[0] < m:
            raise FitError(f"{X.shape[0]} frames cannot support {m} components")
        if X.shape[0] < 10 * m:
            warnings.warn(
                f"only {X.shape[0]} frames for {m} components; estimates will be noisy",
                DataSizeWarning,
                stacklevel=2,
            )
        rng = np.random.default_rng(self.seed)
        floor = variance_floor(X, self.variance_floor_factor)
        delta = 0.01 * np.sqrt(np.maximum(X.var(axis=0), MIN_VARIANCE_FLOOR))

        model = DiagonalGmm.from_parameters(
            np.ones(1),
            X.mean(axis=0)[None, :],
            np.maximum(X.var(axis=0), floor)[None, :],
        )
        path = []
        while model.weights_.size < m:
            centroids = np.concatenate([model.means_ + delta, model.means_ - delta], axis=0)
            centroids, assignments, _ = lloyd_kmeans(X, centroids, rng=rng)
            model = _cells_to_gmm(X, centroids, assignments, floor)
            model, history = em_train(
                model, X, max_iters=self.split_em_iters, tol=0.0, floor=floor
            )
            path.append(history)
        model, history = em_train(model, X, max_iters=self.max_iters, tol=self.tol, floor=floor)
        path.append(history)

        self.weights_ = model.weights_
        self.means_ = model.means_
        self.variances_ = model.variances_
        self.n_features_ = X.shape[1]
        self.loglik_path_ = path
        return self


def _cells_to_gmm(
    X: np.ndarray, centroids: np.ndarray, assignments: np.ndarray, floor: np.ndarray
) -> DiagonalGmm:
    """GMM parameters from k-means cells (counts, centroids, cell variances)."""
    k = centroids.shape[0]
    weights = np.bincount(assignments, minlength=k).astype(np.float64)
    weights = np.maximum(weights, 1.0)
    weights = weights / weights.sum()
    variances = np.empty_like(centroids)
    global_var = np.maximum(X.var(axis=0), floor)
    for i in range(k):
        members = X[assignments == i]
        if members.shape[0] > 1:
            variances[i] = np.maximum(members.var(axis=0), floor)
        else:
            variances[i] = global_var
    return DiagonalGmm.from_parameters(weights, centroids, variances)


def em_train(
    model: DiagonalGmm,
    X,
    max_iters: int = 100,
    tol: float = 1e-5,
    floor: np.ndarray | float | None = None,
) -> tuple[DiagonalGmm, np.ndarray]:
    """Standard EM for a diagonal GMM; variances are floored each M-step.

    Returns the refined model and the per-iteration total log-likelihoods.
    Stops when the relative gain drops below ``tol`` or after ``max_iters``.
    """
    X = _as_data(X)
    if floor is None:
        floor = variance_floor(X, 0.01)
    floor = np.broadcast_to(np.asarray(floor, dtype=np.float64), (X.shape[1],))

    weights = model.weights_.copy()
    means = model.means_.copy()
    variances = model.variances_.copy()
    history = []
    current = model._replace(weights, means, variances)
    previous_ll = -np.inf
    for iteration in range(max_iters):
        joint = current.weighted_log_densities(X)
        per_frame = logsumexp(joint, axis=1)
        total_ll = float(per_frame.sum())
        if not np.isfinite(total_ll):
            raise FitError(f"non-finite log-likelihood at EM iteration {iteration}")
        history.append(total_ll)

        resp = np.exp(joint - per_frame[:, None])
        counts = resp.sum(axis=0)
        occupied = counts > EMPTY_COMPONENT_COUNT
        new_means = current.means_.copy()
        new_vars = current.variances_.copy()
        safe_counts = np.where(occupied, counts, 1.0)
        moments1 = (resp.T @ X) / safe_counts[:, None]
        moments2 = (resp.T @ (X * X)) / safe_counts[:, None]
        new_means[occupied] = moments1[occupied]
        new_vars[occupied] = moments2[occupied] - moments1[occupied] ** 2
        new_vars = np.maximum(new_vars, floor)
        new_weights = counts / X.shape[0]
        new_weights = new_weights / new_weights.sum()
        current = current._replace(new_weights, new_means, new_vars)

        if previous_ll > -np.inf and tol > 0.0:
            gain = (total_ll - previous_ll) / max(abs(previous_ll), 1e-300)
            if gain < tol:
                break
        previous_ll = total_ll
    return current, np.asarray(history)


# -- split vector quantization ------------------------------------------


def lloyd_kmeans(
    X: np.ndarray,
    centroids: np.ndarray,
    max_iters: int = 50,
    rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Lloyd iterations; empty cells are re-seeded by splitting the largest cell.

    Returns (centroids, assignments, distortion history).  Distortion is the
    mean squared distance to the assigned centroid and never increases.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    centroids = centroids.copy()
    history = []
    assignments = None
    for _ in range(max_iters):
        d2 = (
            np.sum(X * X, axis=1)[:, None]
            - 2.0 * X @ centroids.T
            + np.sum(centroids * centroids, axis=1)
        )
        new_assignments = np.argmin(d2, axis=1)
        history.append(float(np.mean(np.maximum(d2[np.arange(X.shape[0]), new_assignments], 0.0))))
        if assignments is not None and np.array_equal(new_assignments, assignments):
            break
        assignments = new_assignments
        for k in range(centroids.shape[0]):
            members = X[assignments == k]
            if members.shape[0] > 0:
                centroids[k] = members.mean(axis=0)
            else:
                largest = np.argmax(np.bincount(assignments, minlength=centroids.shape[0]))
                jitter = 1e-3 * rng.standard_normal(X.shape[1]) * (X.std(axis=0) + 1e-12)
                centroids[k] = centroids[largest] + jitter
    return centroids, assignments, np.asarray(history)


def split_vq_init(
    X,
    n_components: int,
    seed: int = 0,
    variance_floor_factor: float = 0.01,
    kmeans_max_iters: int = 50,
) -> DiagonalGmm:
    """Initial GMM from binary-split vector quantization.

    Starting at the global mean, each centroid is split by +/- 1% of the
    per-dimension standard deviation and k-means is run to convergence; the
    final cells provide initial weights, means and variances.
    """
    X = _as_data(X)
    m = int(n_components)
    if m < 1 or (m & (m - 1)) != 0:
        raise ValueError(f"n_components must be a power of two, got {m}")
    if X.shape[0] < m:
        raise FitError(f"{X.shape[0]} frames cannot support {m} centroids")
    rng = np.random.default_rng(seed)
    floor = variance_floor(X, variance_floor_factor)
    delta = 0.01 * np.sqrt(np.maximum(X.var(axis=0), MIN_VARIANCE_FLOOR))

    centroids = X.mean(axis=0)[None, :]
    assignments = np.zeros(X.shape[0], dtype=int)
    while centroids.shape[0] < m:
        centroids = np.concatenate([centroids + delta, centroids - delta], axis=0)
        centroids, assignments, _ = lloyd_kmeans(X, centroids, max_iters=kmeans_max_iters, rng=rng)
    return _cells_to_gmm(X, centroids, assignments, floor)


# -- MAP adaptation and trial scoring -------------------------------------


def map_adapt(ubm: DiagonalGmm, X, relevance_factor: float = 14.0) -> DiagonalGmm:
    """Adapt the background model's means toward the data; weights and variances
    are copied unchanged.

    Each mean moves by the data-dependent factor alpha_m = n_m / (n_m + r)
    toward the posterior-weighted data mean, where n_m is the soft count for
    component m and r the relevance factor.
    """
    X = _as_data(X)
    if relevance_factor <= 0:
        raise ValueError(f"relevance_factor must be positive, got {relevance_factor}")
    resp = ubm.responsibilities(X)
    counts = resp.sum(axis=0)
    occupied = counts > EMPTY_COMPONENT_COUNT
    safe_counts = np.where(occupied, counts, 1.0)
    data_means = (resp.T @ X) / safe_counts[:, None]
    alpha = counts / (counts + relevance_factor)
    new_means = ubm.means_.copy()
    new_means[occupied] = (
        alpha[occupied, None] * data_means[occupied]
        + (1.0 - alpha[occupied, None]) * ubm.means_[occupied]
    )
    meta = dict(ubm.meta or {})
    meta["map_relevance_factor"] = float(relevance_factor)
    return DiagonalGmm.from_parameters(ubm.weights_, new_means, ubm.variances_, meta=meta)


def top_c_llr(ubm: DiagonalGmm, target: DiagonalGmm, X, top_c: int = 5) -> float:
    """Average per-frame log-likelihood ratio over the UBM's top-C components.

    For each frame the C components with the highest weighted density under
    the background model are selected, and both the target and background sums
    are restricted to them.  With ``top_c == n_components`` this is the exact
    full ratio.
    """
    return top_c_llr_many(ubm, [target], X, top_c=top_c)[0]


def top_c_llr_many(
    ubm: DiagonalGmm,
    targets,
    X,
    top_c: int = 5,
) -> list[float]:
    """Top-C scores of several targets against one cached background pass."""
    X = _as_data(X)
    m = ubm.weights_.size
    if not 1 <= top_c <= m:
        raise ValueError(f"top_c must be in [1, {m}], got {top_c}")
    joint_ubm = ubm.weighted_log_densities(X)
    if top_c == m:
        idx = np.tile(np.arange(m), (X.shape[0], 1))
    else:
        idx = np.argpartition(joint_ubm, m - top_c, axis=1)[:, m - top_c :]
    rows = np.arange(X.shape[0])[:, None]
    denom = logsumexp(joint_ubm[rows, idx], axis=1)
    scores = []
    for target in targets:
        if target.means_.shape != ubm.means_.shape:
            raise ValueError("target and background models have different shapes")
        joint_target = target.weighted_log_densities(X)
        numer = logsumexp(joint_target[rows, idx], axis=1)
        scores.append(float(np.mean(numer - denom)))
    return scores


# -- serialization ---------------------------------------------------------


def save_gmm(model: DiagonalGmm, path) -> None:
    """Write the documented little-endian binary model file."""
    meta = json.dumps(model.meta or {}, sort_keys=True).encode("utf-8")
    m, d = model.means_.shape
    with open(path, "wb") as fh:
        fh.write(GMM_MAGIC)
        fh.write(struct.pack("<III", GMM_VERSION, m, d))
        fh.write(model.weights_.astype("<f8").tobytes())
        fh.write(model.means_.astype("<f8").tobytes())
        fh.write(model.variances_.astype("<f8").tobytes())
        fh.write(struct.pack("<I", len(meta)))
        fh.write(meta)


def load_gmm(path) -> DiagonalGmm:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != GMM_MAGIC:
            raise FitError(f"{path}: not a GMM model file (magic {magic!r})")
        version, m, d = struct.unpack("<III", fh.read(12))
        if version != GMM_VERSION:
            raise FitError(f"{path}: unsupported model version {version}")
        weights = np.frombuffer(fh.read(8 * m), dtype="<f8").copy()
        means = np.frombuffer(fh.read(8 * m * d), dtype="<f8").reshape(m, d).copy()
        variances = np.frombuffer(fh.read(8 * m * d), dtype="<f8").reshape(m, d).copy()
        (meta_len,) = struct.unpack("<I", fh.read(4))
        meta = json.loads(fh.read(meta_len).decode("utf-8")) if meta_len else None
    return DiagonalGmm.from_parameters(weights, means, variances, meta=meta)
