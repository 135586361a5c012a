"""Additive-noise corruption at controlled SNR, with replayable provenance.

SNR is defined over the whole utterance: the noise segment is scaled so that
10*log10(P_speech / P_scaled_segment) equals the requested SNR exactly, where
both powers are mean squares over all samples.  Every random choice (segment
offset, noise type, SNR draw) comes from a seeded generator so a run can be
reproduced bit for bit from its provenance records.
"""

from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .audio import Waveform
from .errors import HeadroomWarning, NoiseMixError


@dataclass(frozen=True)
class NoiseMixSpec:
    """One mixing request: which noise, at what SNR, under which seed."""

    noise_id: str
    snr_db: float
    rng_seed: int = 0
    allow_wrap: bool = False

    def __post_init__(self):
        if not np.isfinite(self.snr_db):
            raise ValueError(f"snr_db must be finite, got {self.snr_db}")


@dataclass(frozen=True)
class DistortionPolicy:
    """Randomized corruption: uniform noise choice from a pool, uniform SNR in a range."""

    noise_pool: tuple[str, ...]
    snr_range_db: tuple[float, float] = (0.0, 40.0)
    rng_seed: int = 0
    allow_wrap: bool = False

    def __post_init__(self):
        pool = tuple(self.noise_pool)
        if not pool:
            raise ValueError("noise_pool must not be empty")
        lo, hi = float(self.snr_range_db[0]), float(self.snr_range_db[1])
        if not lo <= hi:
            raise ValueError(f"snr_range_db must satisfy lo <= hi, got [{lo}, {hi}]")
        object.__setattr__(self, "noise_pool", pool)
        object.__setattr__(self, "snr_range_db", (lo, hi))


@dataclass(frozen=True)
class MixRecord:
    """Provenance of one mix; enough to replay it exactly."""

    utterance_id: str
    noise_id: str
    snr_db: float
    offset: int

    def to_line(self) -> str:
        return f"{self.utterance_id} {self.noise_id} {self.snr_db!r} {self.offset}"

    @classmethod
    def from_line(cls, line: str) -> "MixRecord":
        utt_id, noise_id, snr, offset = line.split()
        return cls(utt_id, noise_id, float(snr), int(offset))


def _mean_square(x: np.ndarray) -> float:
    return float(np.mean(x * x))


def _cut_segment(noise: Waveform, offset: int, length: int, allow_wrap: bool) -> np.ndarray:
    n = len(noise)
    if offset < 0 or offset >= n:
        raise NoiseMixError(f"segment offset {offset} outside noise of {n} samples")
    if offset + length <= n:
        return noise.samples[offset : offset + length]
    if not allow_wrap:
        raise NoiseMixError(
            f"noise of {n} samples cannot cover {length} samples from offset {offset} without wrapping"
        )
    idx = (offset + np.arange(length)) % n
    return noise.samples[idx]


def mix_at_offset(
    speech: Waveform,
    noise: Waveform,
    offset: int,
    snr_db: float,
    allow_wrap: bool = False,
) -> Waveform:
    """Deterministic mixing core: cut segment at ``offset``, scale to the SNR, add."""
    if speech.sample_rate != noise.sample_rate:
        raise NoiseMixError(
            f"sample rates differ: speech {speech.sample_rate} Hz vs noise {noise.sample_rate} Hz"
        )
    segment = _cut_segment(noise, offset, len(speech), allow_wrap)
    p_speech = _mean_square(speech.samples)
    p_noise = _mean_square(segment)
    if p_speech <= 0.0:
        raise NoiseMixError(f"{speech.id or 'speech'}: zero-power speech signal")
    if p_noise <= 0.0:
        raise NoiseMixError(f"{noise.id or 'noise'}: zero-power noise segment at offset {offset}")
    scale = np.sqrt(p_speech / (p_noise * 10.0 ** (snr_db / 10.0)))
    mixed = speech.samples + scale * segment
    if np.max(np.abs(mixed)) > 1.0:
        warnings.warn(
            f"{speech.id or 'mix'}: mixed samples exceed [-1, 1]; output is not clipped",
            HeadroomWarning,
            stacklevel=2,
        )
    return Waveform(samples=mixed, sample_rate=speech.sample_rate, id=speech.id)


def mix_noise(
    speech: Waveform,
    noise: Waveform,
    spec: NoiseMixSpec,
    rng: np.random.Generator | None = None,
) -> tuple[Waveform, MixRecord]:
    """Mix a randomly positioned noise segment into ``speech`` at ``spec.snr_db``.

    Returns the mixed waveform together with the provenance record holding the
    drawn offset.  Pass ``rng`` to thread an external generator (as the corpus
    distortion does); otherwise one is created from ``spec.rng_seed``.
    """
    if rng is None:
        rng = np.random.default_rng(spec.rng_seed)
    max_start = len(noise) - len(speech)
    if max_start < 0 and not spec.allow_wrap:
        raise NoiseMixError(
            f"noise of {len(noise)} samples is shorter than speech of {len(speech)} samples "
            "(set allow_wrap to permit wrap-around)"
        )
    if spec.allow_wrap:
        offset = int(rng.integers(0, len(noise)))
    else:
        offset = int(rng.integers(0, max_start + 1))
    mixed = mix_at_offset(speech, noise, offset, spec.snr_db, allow_wrap=spec.allow_wrap)
    record = MixRecord(speech.id, spec.noise_id, float(spec.snr_db), offset)
    return mixed, record


def utterance_rng(seed: int, utterance_id: str) -> np.random.Generator:
    """Per-utterance generator derived from (seed, id); order-independent."""
    digest = hashlib.sha256(utterance_id.encode("utf-8")).digest()
    return np.random.default_rng((int(seed), int.from_bytes(digest[:8], "little")))


def distort_corpus(
    utterances: Iterable[Waveform],
    noises: Mapping[str, Waveform],
    policy: DistortionPolicy,
) -> list[tuple[Waveform, MixRecord]]:
    """Corrupt each utterance with a random noise from the pool at a random SNR."""
    missing = [n for n in policy.noise_pool if n not in noises]
    if missing:
        raise NoiseMixError(f"noise ids not registered: {', '.join(missing)}")
    pool = sorted(policy.noise_pool)
    lo, hi = policy.snr_range_db
    out = []
    for utt in utterances:
        rng = utterance_rng(policy.rng_seed, utt.id)
        noise_id = pool[int(rng.integers(len(pool)))]
        snr_db = float(rng.uniform(lo, hi))
        spec = NoiseMixSpec(noise_id, snr_db, rng_seed=policy.rng_seed, allow_wrap=policy.allow_wrap)
        out.append(mix_noise(utt, noises[noise_id], spec, rng=rng))
    return out


def replay_mix(speech: Waveform, noise: Waveform, record: MixRecord) -> Waveform:
    """Reproduce a mix from its provenance record."""
    wrap = record.offset + len(speech) > len(noise)
    return mix_at_offset(speech, noise, record.offset, record.snr_db, allow_wrap=wrap)


def save_records(records: Iterable[MixRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(record.to_line() + "\n")


def load_records(path) -> list[MixRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(MixRecord.from_line(line))
    return records
