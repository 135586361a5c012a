"""Trial scoring metrics: DET sweep, equal error rate, minimum detection cost,
and test-normalization of raw scores.

All metrics sweep the thresholds at every distinct score (plus a final
reject-everything point), so they are exact rank statistics: any strictly
increasing transform of the scores leaves them unchanged.  The equal error
rate is read off without curve interpolation: at the sweep point minimizing
|P_miss - P_fa| (ties broken toward the lower threshold), the larger of the
two rates is reported.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ScoringError
from .validation import as_float_array

TNORM_SIGMA_FLOOR = 1e-6


@dataclass(frozen=True)
class DcfParams:
    """Detection cost parameters; the defaults weight false acceptances 10:1."""

    cost_fr: float = 1.0
    cost_fa: float = 10.0
    p_target: float = 0.1

    def __post_init__(self):
        if self.cost_fr <= 0 or self.cost_fa <= 0:
            raise ValueError("costs must be positive")
        if not 0.0 < self.p_target < 1.0:
            raise ValueError("p_target must lie in (0, 1)")

    @property
    def trivial_bound(self) -> float:
        """Cost of the better of reject-everything and accept-everything."""
        return min(self.cost_fr * self.p_target, self.cost_fa * (1.0 - self.p_target))


@dataclass(frozen=True)
class TrialScore:
    model_id: str
    test_id: str
    score: float
    target: bool

    def to_line(self) -> str:
        label = "target" if self.target else "nontarget"
        return f"{self.model_id} {self.test_id} {self.score!r} {label}"

    @classmethod
    def from_line(cls, line: str) -> "TrialScore":
        model_id, test_id, score, label = line.split()
        if label not in ("target", "nontarget"):
            raise ValueError(f"bad trial label {label!r}")
        return cls(model_id, test_id, float(score), label == "target")


def score_arrays(records: Sequence[TrialScore]) -> tuple[np.ndarray, np.ndarray]:
    scores = np.array([r.score for r in records], dtype=np.float64)
    labels = np.array([r.target for r in records], dtype=bool)
    return scores, labels


def _split(scores, labels) -> tuple[np.ndarray, np.ndarray]:
    scores = as_float_array(scores, "scores", ndim=1)
    labels = np.asarray(labels, dtype=bool)
    if labels.shape != scores.shape:
        raise ValueError("scores and labels must have the same length")
    targets = scores[labels]
    impostors = scores[~labels]
    if targets.size == 0 or impostors.size == 0:
        raise ScoringError("need at least one target and one impostor score")
    return targets, impostors


def det_points(scores, labels) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Threshold sweep over every distinct score plus a reject-all endpoint.

    Returns (thresholds, P_fa, P_miss) where at threshold t a trial is
    accepted when its score is >= t: P_miss is the fraction of target scores
    below t and P_fa the fraction of impostor scores at or above t.
    """
    targets, impostors = _split(scores, labels)
    thresholds = np.unique(np.concatenate([targets, impostors]))
    thresholds = np.append(thresholds, np.inf)
    targets_sorted = np.sort(targets)
    impostors_sorted = np.sort(impostors)
    p_miss = np.searchsorted(targets_sorted, thresholds, side="left") / targets.size
    p_fa = (
        impostors.size - np.searchsorted(impostors_sorted, thresholds, side="left")
    ) / impostors.size
    return thresholds, p_fa, p_miss


def eer(scores, labels) -> float:
    """Rate at the sweep point where miss and false-acceptance rates cross."""
    _, p_fa, p_miss = det_points(scores, labels)
    gaps = np.abs(p_miss - p_fa)
    best = int(np.argmin(gaps))
    return float(max(p_miss[best], p_fa[best]))


def min_dcf(scores, labels, params: DcfParams = DcfParams()) -> float:
    """Minimum over the DET sweep of the cost- and prior-weighted error sum."""
    _, p_fa, p_miss = det_points(scores, labels)
    dcf = (
        params.cost_fr * p_miss * params.p_target
        + params.cost_fa * p_fa * (1.0 - params.p_target)
    )
    return float(dcf.min())


def dcf_at_threshold(scores, labels, threshold: float, params: DcfParams = DcfParams()) -> float:
    targets, impostors = _split(scores, labels)
    p_miss = float(np.mean(targets < threshold))
    p_fa = float(np.mean(impostors >= threshold))
    return params.cost_fr * p_miss * params.p_target + params.cost_fa * p_fa * (1.0 - params.p_target)


def cohort_from_records(records: Iterable[TrialScore]) -> dict[str, np.ndarray]:
    """Group cohort scores by test id."""
    grouped: dict[str, list[float]] = {}
    for record in records:
        grouped.setdefault(record.test_id, []).append(record.score)
    return {test_id: np.asarray(values) for test_id, values in grouped.items()}


def tnorm(
    records: Sequence[TrialScore], cohort_scores: Mapping[str, np.ndarray]
) -> list[TrialScore]:
    """Standardize each score by the cohort mean and deviation for its test id.

    Every test id must have at least two cohort scores; the deviation is
    floored at ``TNORM_SIGMA_FLOOR``.
    """
    normalized = []
    for record in records:
        if record.test_id not in cohort_scores:
            raise ScoringError(f"no cohort scores for test id {record.test_id!r}")
        cohort = as_float_array(cohort_scores[record.test_id], "cohort scores", ndim=1)
        if cohort.size < 2:
            raise ScoringError(
                f"test id {record.test_id!r} has {cohort.size} cohort scores; need at least 2"
            )
        sigma = max(float(cohort.std()), TNORM_SIGMA_FLOOR)
        normalized.append(replace(record, score=(record.score - float(cohort.mean())) / sigma))
    return normalized


def save_scores(records: Iterable[TrialScore], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(record.to_line() + "\n")


def load_scores(path) -> list[TrialScore]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(TrialScore.from_line(line))
    return records
