"""Per-frame speech/non-speech masks and their run-length text format.

Mask files hold one line per utterance: the utterance id followed by
run-length tokens like ``1x40 0x12 1x300`` (value ``x`` run length), which
diffs cleanly in regression tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..audio import FramingSpec


@dataclass(eq=False)
class SpeechMask:
    """Boolean speech decisions aligned to the framing of one utterance."""

    decisions: np.ndarray
    spec: FramingSpec
    source_id: str = ""

    def __post_init__(self):
        self.decisions = np.asarray(self.decisions, dtype=bool)
        if self.decisions.ndim != 1:
            raise ValueError("mask decisions must be 1-D")

    def __len__(self) -> int:
        return self.decisions.size

    @property
    def retained_fraction(self) -> float:
        if self.decisions.size == 0:
            return 0.0
        return float(self.decisions.mean())


def apply_mask(matrix, mask) -> np.ndarray:
    """Keep the rows where the mask is true, preserving order.

    An all-false mask yields an empty matrix; callers decide whether that is
    an error.
    """
    decisions = mask.decisions if isinstance(mask, SpeechMask) else np.asarray(mask, dtype=bool)
    matrix = np.asarray(matrix)
    if matrix.shape[0] != decisions.size:
        raise ValueError(
            f"mask of length {decisions.size} does not match {matrix.shape[0]} rows"
        )
    return matrix[decisions]


def encode_runs(decisions: np.ndarray) -> str:
    """Run-length encode a boolean sequence as ``1x40 0x12 ...`` tokens."""
    decisions = np.asarray(decisions, dtype=bool)
    if decisions.size == 0:
        return ""
    boundaries = np.flatnonzero(np.diff(decisions.astype(np.int8))) + 1
    starts = np.concatenate([[0], boundaries])
    ends = np.concatenate([boundaries, [decisions.size]])
    return " ".join(f"{int(decisions[s])}x{e - s}" for s, e in zip(starts, ends))


def decode_runs(text: str) -> np.ndarray:
    parts = text.split()
    chunks = []
    for token in parts:
        value, _, count = token.partition("x")
        if value not in ("0", "1") or not count.isdigit():
            raise ValueError(f"bad run-length token {token!r}")
        chunks.append(np.full(int(count), value == "1", dtype=bool))
    if not chunks:
        return np.zeros(0, dtype=bool)
    return np.concatenate(chunks)


def save_masks(masks: dict[str, np.ndarray], path) -> None:
    """Write one ``utt_id <runs>`` line per utterance, in dict order."""
    with open(path, "w", encoding="utf-8") as fh:
        for utt_id, decisions in masks.items():
            runs = encode_runs(np.asarray(decisions, dtype=bool))
            fh.write(f"{utt_id} {runs}".rstrip() + "\n")


def load_masks(path) -> dict[str, np.ndarray]:
    masks: dict[str, np.ndarray] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            utt_id, _, runs = line.partition(" ")
            masks[utt_id] = decode_runs(runs)
    return masks
