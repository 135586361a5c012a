"""Corpus manifests and the declarative experiment configuration.

A manifest is a JSON file listing the utterances (id, path, speaker, gender,
role), the registered noise files, and the trial list.  Paths are resolved
relative to the manifest's directory.  The experiment configuration is a flat
set of fields with CLI flags taking precedence over the config file; the hash
of the data-affecting fields is stamped into every pipeline output so stale
artifacts are rejected instead of silently mixed.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ManifestError
from .sad import DETECTORS

ROLES = ("ubm", "train", "test", "cohort")
ID_PATTERN = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_.\-]*$")

# metric-only fields do not invalidate pipeline artifacts
REPORT_ONLY_FIELDS = ("cost_fr", "cost_fa", "p_target")


@dataclass(frozen=True)
class UtteranceEntry:
    id: str
    path: Path
    speaker_id: str
    gender: str
    role: str


@dataclass(frozen=True)
class Trial:
    model_id: str
    test_id: str
    target: bool


@dataclass
class Manifest:
    utterances: list[UtteranceEntry]
    noises: dict[str, Path]
    trials_path: Path | None
    base_dir: Path

    def by_role(self, *roles: str) -> list[UtteranceEntry]:
        return [u for u in self.utterances if u.role in roles]

    def by_id(self, utt_id: str) -> UtteranceEntry:
        for utt in self.utterances:
            if utt.id == utt_id:
                return utt
        raise ManifestError(f"unknown utterance id {utt_id!r}")

    def load_trials(self) -> list[Trial]:
        if self.trials_path is None:
            raise ManifestError("manifest declares no trial list")
        trials = []
        seen = set()
        with open(self.trials_path, "r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                parts = line.split()
                if len(parts) != 3 or parts[2] not in ("target", "nontarget"):
                    raise ManifestError(
                        f"{self.trials_path}:{line_no}: expected 'model test target|nontarget'"
                    )
                key = (parts[0], parts[1])
                if key in seen:
                    raise ManifestError(f"{self.trials_path}:{line_no}: duplicate trial {key}")
                seen.add(key)
                trials.append(Trial(parts[0], parts[1], parts[2] == "target"))
        return trials


def _check_id(value: str, what: str) -> str:
    if not ID_PATTERN.match(value):
        raise ManifestError(f"{what} {value!r} contains characters outside [A-Za-z0-9_.-]")
    return value


def load_manifest(path) -> Manifest:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError(f"{path}: cannot read manifest ({exc})") from exc
    base = path.parent

    utterances = []
    seen_ids = set()
    for entry in raw.get("utterances", []):
        missing = {"id", "path", "speaker_id", "gender", "role"} - set(entry)
        if missing:
            raise ManifestError(f"{path}: utterance entry missing fields {sorted(missing)}")
        utt_id = _check_id(str(entry["id"]), "utterance id")
        if utt_id in seen_ids:
            raise ManifestError(f"{path}: duplicate utterance id {utt_id!r}")
        seen_ids.add(utt_id)
        if entry["role"] not in ROLES:
            raise ManifestError(
                f"{path}: utterance {utt_id!r} has role {entry['role']!r}; expected one of {ROLES}"
            )
        wav_path = (base / entry["path"]).resolve()
        if not wav_path.is_file():
            raise ManifestError(f"{path}: utterance {utt_id!r} file not found: {wav_path}")
        utterances.append(
            UtteranceEntry(
                id=utt_id,
                path=wav_path,
                speaker_id=_check_id(str(entry["speaker_id"]), "speaker id"),
                gender=str(entry["gender"]),
                role=str(entry["role"]),
            )
        )
    if not utterances:
        raise ManifestError(f"{path}: manifest lists no utterances")

    noises = {}
    for noise_id, noise_path in raw.get("noises", {}).items():
        _check_id(str(noise_id), "noise id")
        resolved = (base / noise_path).resolve()
        if not resolved.is_file():
            raise ManifestError(f"{path}: noise {noise_id!r} file not found: {resolved}")
        noises[str(noise_id)] = resolved

    trials_path = None
    if raw.get("trials"):
        trials_path = (base / raw["trials"]).resolve()
        if not trials_path.is_file():
            raise ManifestError(f"{path}: trial list not found: {trials_path}")

    return Manifest(utterances=utterances, noises=noises, trials_path=trials_path, base_dir=base)


def manifest_sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass(frozen=True)
class ExperimentConfig:
    """Flat experiment configuration; flags override file fields."""

    # frame selection
    sad_method: str = "none"
    sad_params: dict = field(default_factory=dict)
    # framing
    frame_len_ms: float = 20.0
    hop_ms: float = 10.0
    # features
    n_mel_filters: int = 20
    n_ceps: int = 19
    delta_window: int = 2
    nfft: int = 256
    preemphasis: float = 0.97
    cmvn: bool = False
    # classifier
    n_mixtures: int = 256
    relevance_factor: float = 14.0
    top_c: int = 5
    em_tol: float = 1e-5
    em_max_iters: int = 100
    split_em_iters: int = 4
    variance_floor_factor: float = 0.01
    # metrics (report-only: excluded from the artifact hash)
    cost_fr: float = 1.0
    cost_fa: float = 10.0
    p_target: float = 0.1
    # randomness
    seed: int = 0

    def __post_init__(self):
        if self.sad_method not in DETECTORS:
            raise ManifestError(
                f"unknown sad_method {self.sad_method!r}; expected one of {sorted(DETECTORS)}"
            )

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def data_hash(self) -> str:
        """Hash of every field that affects pipeline artifacts."""
        payload = {
            k: v for k, v in self.to_dict().items() if k not in REPORT_ONLY_FIELDS
        }
        blob = json.dumps(payload, sort_keys=True, default=str).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()[:16]


def load_config(path=None, overrides: dict | None = None) -> ExperimentConfig:
    """Config file plus overrides; override values of None are ignored."""
    values: dict = {}
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ManifestError(f"{path}: cannot read config ({exc})") from exc
        known = {f.name for f in fields(ExperimentConfig)}
        unknown = set(raw) - known
        if unknown:
            raise ManifestError(f"{path}: unknown config fields {sorted(unknown)}")
        values.update(raw)
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    try:
        return ExperimentConfig(**values)
    except TypeError as exc:
        raise ManifestError(f"invalid configuration: {exc}") from exc
