"""Command-line pipeline: sad, mix, extract, train-ubm, adapt, score, tnorm,
eval, spectrum.

Every stage is a pure function of (manifest, config, seed); outputs carry a
``<name>.meta.json`` sidecar with the configuration hash, and stages refuse
inputs whose hash differs from their own resolved configuration.  Files are
written atomically (temp file + rename).

Exit codes: 0 success, 2 usage, 3 manifest/config, 4 stale artifact, 5 audio
format, 6 framing, 7 noise mixing, 8 model estimation, 9 scoring/metrics,
1 unexpected failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .audio import FramingSpec, avg_magnitude_spectrum, frame_signal, read_wav, write_wav
from .errors import (
    ArtifactMismatchError,
    AudioFormatError,
    FitError,
    FramingError,
    ManifestError,
    NoiseMixError,
    SadkitError,
    ScoringError,
)
from .features import FeatureMatrix, MfccExtractor, cmvn, load_features, save_features
from .gmm import DiagonalGmm, load_gmm, map_adapt, save_gmm, top_c_llr_many
from .manifest import (
    ExperimentConfig,
    Manifest,
    load_config,
    load_manifest,
    manifest_sha256,
)
from .metrics import (
    DcfParams,
    TrialScore,
    cohort_from_records,
    det_points,
    eer,
    load_scores,
    min_dcf,
    save_scores,
    tnorm,
)
from .noise import (
    DistortionPolicy,
    NoiseMixSpec,
    mix_noise,
    save_records,
    utterance_rng,
)
from .sad import apply_mask, load_masks, make_detector, save_masks

EXIT_CODES = (
    (ArtifactMismatchError, 4),
    (AudioFormatError, 5),
    (FramingError, 6),
    (NoiseMixError, 7),
    (FitError, 8),
    (ScoringError, 9),
    (ManifestError, 3),
    (SadkitError, 1),
)


# -- small infrastructure --------------------------------------------------


def atomic_write_text(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_sidecar(path: Path, stage: str, config: ExperimentConfig, extra: dict | None = None) -> None:
    payload = {"stage": stage, "config_hash": config.data_hash(), "tool": f"sadkit {__version__}"}
    if extra:
        payload.update(extra)
    atomic_write_text(Path(str(path) + ".meta.json"), json.dumps(payload, sort_keys=True) + "\n")


def check_sidecar(path: Path, config: ExperimentConfig) -> dict:
    meta_path = Path(str(path) + ".meta.json")
    if not meta_path.is_file():
        raise ArtifactMismatchError(f"{path}: missing sidecar {meta_path.name}; cannot verify provenance")
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    if meta.get("config_hash") != config.data_hash():
        raise ArtifactMismatchError(
            f"{path}: produced under config {meta.get('config_hash')}, "
            f"current config is {config.data_hash()}"
        )
    return meta


def resolve_config(args) -> ExperimentConfig:
    overrides = {
        name: getattr(args, name, None)
        for name in (
            "sad_method",
            "n_mixtures",
            "relevance_factor",
            "top_c",
            "cost_fr",
            "cost_fa",
            "p_target",
            "seed",
        )
    }
    if getattr(args, "cmvn", False):
        overrides["cmvn"] = True
    return load_config(getattr(args, "config", None), overrides)


def sad_framing(config: ExperimentConfig) -> FramingSpec:
    return FramingSpec(config.frame_len_ms, config.hop_ms, window="rectangular")


def parallel_map(func, items, jobs: int):
    if jobs <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items))


def split_roles(value: str) -> list[str]:
    return [part for part in value.split(",") if part]


# -- subcommands -----------------------------------------------------------


def cmd_sad(args) -> int:
    config = resolve_config(args)
    manifest = load_manifest(args.manifest)
    detector = make_detector(config.sad_method, **config.sad_params)
    spec = sad_framing(config)
    entries = manifest.by_role(*split_roles(args.roles))
    if not entries:
        raise ManifestError(f"no utterances with roles {args.roles!r}")

    def run(entry):
        frames = frame_signal(read_wav(entry.path), spec)
        return entry.id, detector.predict(frames)

    results = parallel_map(run, entries, args.jobs)
    masks = {utt_id: decisions for utt_id, decisions in results}
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_masks(masks, out)
    write_sidecar(out, "sad", config, {"method": config.sad_method})
    total = sum(int(d.size) for d in masks.values())
    kept = sum(int(d.sum()) for d in masks.values())
    print(
        f"sad method={config.sad_method} utterances={len(masks)} "
        f"retained={100.0 * kept / max(total, 1):.2f}% of {total} frames"
    )
    return 0


def cmd_mix(args) -> int:
    config = resolve_config(args)
    manifest = load_manifest(args.manifest)
    entries = manifest.by_role(*split_roles(args.roles))
    if not entries:
        raise ManifestError(f"no utterances with roles {args.roles!r}")
    fixed_mode = args.noise is not None
    if fixed_mode == (args.policy_pool is not None):
        raise ManifestError("choose exactly one of --noise/--snr or --policy-pool/--policy-snr-range")

    noises = {}

    def noise_waveform(noise_id: str):
        if noise_id not in noises:
            if noise_id not in manifest.noises:
                raise NoiseMixError(f"noise id {noise_id!r} is not registered in the manifest")
            noises[noise_id] = read_wav(manifest.noises[noise_id])
        return noises[noise_id]

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if fixed_mode:
        pool = None
        snr_range = (float(args.snr), float(args.snr))
    else:
        pool = tuple(split_roles(args.policy_pool))
        lo, hi = args.policy_snr_range
        snr_range = (float(lo), float(hi))
        DistortionPolicy(pool, snr_range, rng_seed=config.seed)  # validate early

    records = []
    mixed_entries = []
    for entry in entries:
        speech = read_wav(entry.path)
        rng = utterance_rng(config.seed, entry.id)
        if fixed_mode:
            noise_id = args.noise
            snr_db = float(args.snr)
        else:
            sorted_pool = sorted(pool)
            noise_id = sorted_pool[int(rng.integers(len(sorted_pool)))]
            snr_db = float(rng.uniform(*snr_range))
        spec = NoiseMixSpec(noise_id, snr_db, rng_seed=config.seed, allow_wrap=args.allow_wrap)
        mixed, record = mix_noise(speech, noise_waveform(noise_id), spec, rng=rng)
        records.append(record)
        wav_path = out_dir / f"{entry.id}.wav"
        write_wav(wav_path, mixed)
        mixed_entries.append((entry, wav_path))

    provenance = out_dir / "provenance.txt"
    save_records(records, provenance)
    write_sidecar(provenance, "mix", config)

    # derived manifest: mixed roles point at the new files, others keep theirs
    mixed_ids = {entry.id: path for entry, path in mixed_entries}
    derived = {
        "utterances": [
            {
                "id": u.id,
                "path": str(mixed_ids.get(u.id, u.path)),
                "speaker_id": u.speaker_id,
                "gender": u.gender,
                "role": u.role,
            }
            for u in manifest.utterances
        ],
        "noises": {k: str(v) for k, v in manifest.noises.items()},
        "trials": str(manifest.trials_path) if manifest.trials_path else None,
    }
    manifest_out = out_dir / "manifest.json"
    atomic_write_text(manifest_out, json.dumps(derived, indent=2, sort_keys=True) + "\n")
    print(f"mix utterances={len(records)} -> {out_dir} (provenance: {provenance.name})")
    return 0


def cmd_extract(args) -> int:
    config = resolve_config(args)
    manifest = load_manifest(args.manifest)
    masks = None
    if args.masks is not None:
        check_sidecar(Path(args.masks), config)
        masks = load_masks(args.masks)
    extractor = MfccExtractor(
        frame_len_ms=config.frame_len_ms,
        hop_ms=config.hop_ms,
        n_mel_filters=config.n_mel_filters,
        n_ceps=config.n_ceps,
        delta_window=config.delta_window,
        nfft=config.nfft,
        preemphasis=config.preemphasis,
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = manifest.by_role(*split_roles(args.roles))
    if not entries:
        raise ManifestError(f"no utterances with roles {args.roles!r}")

    def run(entry):
        features = extractor.transform(read_wav(entry.path))
        vectors = features.vectors
        if masks is not None:
            if entry.id not in masks:
                raise ArtifactMismatchError(f"{args.masks}: no mask for utterance {entry.id!r}")
            vectors = apply_mask(vectors, masks[entry.id])
        if config.cmvn and vectors.shape[0] >= 2:
            vectors = cmvn(vectors)
        return entry.id, vectors

    results = parallel_map(run, entries, args.jobs)
    kept = total = 0
    for utt_id, vectors in results:
        save_features(FeatureMatrix(vectors=vectors, source_id=utt_id), out_dir / f"{utt_id}.feat")
        kept += vectors.shape[0]
    total = len(results)
    write_sidecar(out_dir / "features", "extract", config, {"utterances": total})
    print(f"extract utterances={total} frames={kept} dim={2 * config.n_ceps} -> {out_dir}")
    return 0


def _load_feature_stack(features_dir: Path, entries, what: str) -> np.ndarray:
    blocks = []
    for entry in entries:
        path = features_dir / f"{entry.id}.feat"
        if not path.is_file():
            raise ArtifactMismatchError(f"{what}: missing feature file {path}")
        blocks.append(load_features(path).vectors)
    stacked = np.concatenate([b for b in blocks if b.size], axis=0) if blocks else np.zeros((0, 0))
    if stacked.shape[0] == 0:
        raise FitError(f"{what}: no frames available after masking")
    return stacked


def cmd_train_ubm(args) -> int:
    config = resolve_config(args)
    manifest = load_manifest(args.manifest)
    features_dir = Path(args.features)
    check_sidecar(features_dir / "features", config)
    entries = manifest.by_role("ubm")
    if args.gender is not None:
        entries = [e for e in entries if e.gender == args.gender]
    if not entries:
        raise ManifestError("no ubm-role utterances match the requested gender")
    data = _load_feature_stack(features_dir, entries, "train-ubm")
    model = DiagonalGmm(
        n_components=config.n_mixtures,
        tol=config.em_tol,
        max_iters=config.em_max_iters,
        split_em_iters=config.split_em_iters,
        variance_floor_factor=config.variance_floor_factor,
        seed=config.seed,
        meta={
            "gender": args.gender or "all",
            "dim": int(data.shape[1]),
            "mixtures": int(config.n_mixtures),
        },
    ).fit(data)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_gmm(model, out)
    write_sidecar(
        out,
        "train-ubm",
        config,
        {
            "manifest_sha256": manifest_sha256(args.manifest),
            "n_frames": int(data.shape[0]),
            "gender": args.gender or "all",
        },
    )
    print(f"train-ubm mixtures={config.n_mixtures} frames={data.shape[0]} -> {out}")
    return 0


def _gender_entries(manifest: Manifest, roles, ubm_gender: str):
    entries = manifest.by_role(*roles)
    if ubm_gender != "all":
        entries = [e for e in entries if e.gender == ubm_gender]
    return entries


def cmd_adapt(args) -> int:
    config = resolve_config(args)
    manifest = load_manifest(args.manifest)
    features_dir = Path(args.features)
    check_sidecar(features_dir / "features", config)
    check_sidecar(Path(args.ubm), config)
    ubm = load_gmm(args.ubm)
    gender = (ubm.meta or {}).get("gender", "all")
    entries = _gender_entries(manifest, split_roles(args.roles), gender)
    if not entries:
        raise ManifestError(f"no utterances with roles {args.roles!r} and gender {gender!r}")
    speakers: dict[str, list] = {}
    for entry in entries:
        speakers.setdefault(entry.speaker_id, []).append(entry)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for speaker_id in sorted(speakers):
        data = _load_feature_stack(features_dir, speakers[speaker_id], f"adapt {speaker_id}")
        model = map_adapt(ubm, data, relevance_factor=config.relevance_factor)
        model.meta["speaker_id"] = speaker_id
        save_gmm(model, out_dir / f"{speaker_id}.gmm")
    write_sidecar(out_dir / "models", "adapt", config, {"models": len(speakers)})
    print(f"adapt speakers={len(speakers)} relevance={config.relevance_factor} -> {out_dir}")
    return 0


def cmd_score(args) -> int:
    config = resolve_config(args)
    manifest = load_manifest(args.manifest)
    features_dir = Path(args.features)
    check_sidecar(features_dir / "features", config)
    check_sidecar(Path(args.ubm), config)
    models_dir = Path(args.models)
    check_sidecar(models_dir / "models", config)
    ubm = load_gmm(args.ubm)

    model_paths = sorted(models_dir.glob("*.gmm"))
    if not model_paths:
        raise ScoringError(f"{models_dir}: no model files")
    models = {path.stem: load_gmm(path) for path in model_paths}

    trials = manifest.load_trials()
    if args.all_pairs:
        test_ids = sorted({t.test_id for t in trials})
        trials = [
            type(trials[0])(model_id, test_id, False)
            for test_id in test_ids
            for model_id in sorted(models)
        ]
    by_test: dict[str, list] = {}
    for trial in trials:
        if trial.model_id not in models:
            raise ScoringError(f"trial references unknown model {trial.model_id!r}")
        by_test.setdefault(trial.test_id, []).append(trial)

    scores: dict[tuple[str, str], float] = {}
    for test_id in sorted(by_test):
        path = features_dir / f"{test_id}.feat"
        if not path.is_file():
            raise ScoringError(f"missing features for test utterance {test_id!r}")
        vectors = load_features(path).vectors
        if vectors.shape[0] == 0:
            raise ScoringError(f"test utterance {test_id!r} has no frames after masking")
        group = by_test[test_id]
        values = top_c_llr_many(
            ubm, [models[t.model_id] for t in group], vectors, top_c=config.top_c
        )
        for trial, value in zip(group, values):
            scores[(trial.model_id, trial.test_id)] = value

    records = [
        TrialScore(t.model_id, t.test_id, scores[(t.model_id, t.test_id)], t.target)
        for t in trials
    ]
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_scores(records, out)
    write_sidecar(out, "score", config, {"trials": len(records), "all_pairs": bool(args.all_pairs)})
    print(f"score trials={len(records)} top_c={config.top_c} -> {out}")
    return 0


def cmd_tnorm(args) -> int:
    config = resolve_config(args)
    check_sidecar(Path(args.scores), config)
    check_sidecar(Path(args.cohort_scores), config)
    raw = load_scores(args.scores)
    cohort = cohort_from_records(load_scores(args.cohort_scores))
    normalized = tnorm(raw, cohort)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_scores(normalized, out)
    write_sidecar(out, "tnorm", config, {"trials": len(normalized)})
    print(f"tnorm trials={len(normalized)} -> {out}")
    return 0


def cmd_eval(args) -> int:
    config = resolve_config(args)
    check_sidecar(Path(args.scores), config)
    records = load_scores(args.scores)
    scores = np.array([r.score for r in records])
    labels = np.array([r.target for r in records])
    params = DcfParams(config.cost_fr, config.cost_fa, config.p_target)
    eer_value = eer(scores, labels)
    dcf_value = min_dcf(scores, labels, params)
    report = (
        f"eer={eer_value!r} mindcf={dcf_value!r} "
        f"trials={len(records)} targets={int(labels.sum())}"
    )
    print(report)
    if args.report is not None:
        path = Path(args.report)
        path.parent.mkdir(parents=True, exist_ok=True)
        atomic_write_text(path, report + "\n")
        write_sidecar(path, "eval", config)
    if args.det_csv is not None:
        thresholds, p_fa, p_miss = det_points(scores, labels)
        lines = ["threshold,p_fa,p_miss"]
        lines += [f"{t!r},{fa!r},{miss!r}" for t, fa, miss in zip(thresholds, p_fa, p_miss)]
        path = Path(args.det_csv)
        path.parent.mkdir(parents=True, exist_ok=True)
        atomic_write_text(path, "\n".join(lines) + "\n")
    return 0


def cmd_spectrum(args) -> int:
    config = resolve_config(args)
    sources = []
    if args.manifest is not None:
        manifest = load_manifest(args.manifest)
        wanted = split_roles(args.ids) if args.ids else [u.id for u in manifest.utterances]
        sources = [(utt_id, manifest.by_id(utt_id).path) for utt_id in wanted]
    for wav in args.wavs:
        sources.append((Path(wav).stem, Path(wav)))
    if not sources:
        raise ManifestError("spectrum needs --manifest and/or wav paths")
    spec = FramingSpec(config.frame_len_ms, config.hop_ms, window=args.window)
    lines = ["source_id,bin,freq_hz,magnitude"]
    curves = []
    for source_id, path in sources:
        waveform = read_wav(path)
        mags = avg_magnitude_spectrum(waveform, spec, args.nfft)
        freqs = np.fft.rfftfreq(args.nfft, 1.0 / waveform.sample_rate)
        curves.append((source_id, freqs, mags))
        lines += [
            f"{source_id},{i},{freq!r},{mag!r}"
            for i, (freq, mag) in enumerate(zip(freqs, mags))
        ]
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    atomic_write_text(out, "\n".join(lines) + "\n")
    if args.plot is not None:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(8, 4))
        for source_id, freqs, mags in curves:
            ax.plot(freqs, mags, label=source_id)
        ax.set_xlabel("frequency (Hz)")
        ax.set_ylabel("average magnitude")
        ax.legend(fontsize="small")
        fig.tight_layout()
        fig.savefig(args.plot, dpi=120)
    print(f"spectrum sources={len(curves)} nfft={args.nfft} -> {out}")
    return 0


# -- argument parsing --------------------------------------------------------


def add_config_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("configuration")
    group.add_argument("--config", type=Path, default=None, help="experiment config JSON")
    group.add_argument("--sad-method", dest="sad_method", default=None,
                       help="frame selection method (g729b, smsad, mebts, aebts, ubgme, none)")
    group.add_argument("--mixtures", dest="n_mixtures", type=int, default=None)
    group.add_argument("--relevance", dest="relevance_factor", type=float, default=None)
    group.add_argument("--top-c", dest="top_c", type=int, default=None)
    group.add_argument("--cost-fr", dest="cost_fr", type=float, default=None)
    group.add_argument("--cost-fa", dest="cost_fa", type=float, default=None)
    group.add_argument("--p-target", dest="p_target", type=float, default=None)
    group.add_argument("--seed", dest="seed", type=int, default=None)
    group.add_argument("--cmvn", action="store_true", help="normalize features after masking")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sadkit",
        description="Speech activity detection and GMM-UBM speaker verification pipeline.",
    )
    parser.add_argument("--version", action="version", version=f"sadkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sad", help="write frame-selection masks for manifest utterances")
    p.add_argument("--manifest", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path, help="mask file (run-length text)")
    p.add_argument("--roles", default="ubm,train,test,cohort")
    p.add_argument("--jobs", type=int, default=1)
    add_config_flags(p)
    p.set_defaults(func=cmd_sad)

    p = sub.add_parser("mix", help="corrupt utterances with additive noise at controlled SNR")
    p.add_argument("--manifest", required=True, type=Path)
    p.add_argument("--out-dir", required=True, type=Path)
    p.add_argument("--roles", default="test")
    p.add_argument("--noise", default=None, help="registered noise id (fixed-SNR mode)")
    p.add_argument("--snr", type=float, default=None, help="SNR in dB (fixed-SNR mode)")
    p.add_argument("--policy-pool", default=None, help="comma list of noise ids (policy mode)")
    p.add_argument("--policy-snr-range", nargs=2, type=float, default=None,
                   metavar=("LO", "HI"), help="uniform SNR range in dB (policy mode)")
    p.add_argument("--allow-wrap", action="store_true",
                   help="permit wrap-around when the noise is shorter than the speech")
    add_config_flags(p)
    p.set_defaults(func=cmd_mix)

    p = sub.add_parser("extract", help="extract masked MFCC+delta features")
    p.add_argument("--manifest", required=True, type=Path)
    p.add_argument("--masks", type=Path, default=None, help="mask file from the sad stage")
    p.add_argument("--out-dir", required=True, type=Path)
    p.add_argument("--roles", default="ubm,train,test,cohort")
    p.add_argument("--jobs", type=int, default=1)
    add_config_flags(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train-ubm", help="train the background model on ubm-role utterances")
    p.add_argument("--manifest", required=True, type=Path)
    p.add_argument("--features", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--gender", default=None, help="restrict to one manifest gender")
    add_config_flags(p)
    p.set_defaults(func=cmd_train_ubm)

    p = sub.add_parser("adapt", help="derive speaker models from the background model")
    p.add_argument("--manifest", required=True, type=Path)
    p.add_argument("--features", required=True, type=Path)
    p.add_argument("--ubm", required=True, type=Path)
    p.add_argument("--out-dir", required=True, type=Path)
    p.add_argument("--roles", default="train", help="roles supplying adaptation data")
    add_config_flags(p)
    p.set_defaults(func=cmd_adapt)

    p = sub.add_parser("score", help="score the manifest trials")
    p.add_argument("--manifest", required=True, type=Path)
    p.add_argument("--features", required=True, type=Path)
    p.add_argument("--ubm", required=True, type=Path)
    p.add_argument("--models", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--all-pairs", action="store_true",
                   help="score every model against every test utterance (cohort scoring)")
    add_config_flags(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("tnorm", help="test-normalize raw scores with cohort scores")
    p.add_argument("--scores", required=True, type=Path)
    p.add_argument("--cohort-scores", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    add_config_flags(p)
    p.set_defaults(func=cmd_tnorm)

    p = sub.add_parser("eval", help="EER / minDCF report and DET points")
    p.add_argument("--scores", required=True, type=Path)
    p.add_argument("--report", type=Path, default=None)
    p.add_argument("--det-csv", type=Path, default=None)
    add_config_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("spectrum", help="average short-time magnitude spectra as CSV")
    p.add_argument("wavs", nargs="*", help="wav files")
    p.add_argument("--manifest", type=Path, default=None)
    p.add_argument("--ids", default=None, help="comma list of manifest utterance ids")
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--nfft", type=int, default=256)
    p.add_argument("--window", default="hamming", choices=("rectangular", "hamming"))
    p.add_argument("--plot", type=Path, default=None, help="optional PNG output")
    add_config_flags(p)
    p.set_defaults(func=cmd_spectrum)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SadkitError as exc:
        print(f"sadkit {args.command}: {exc}", file=sys.stderr)
        for error_type, code in EXIT_CODES:
            if isinstance(exc, error_type):
                return code
        return 1


if __name__ == "__main__":
    sys.exit(main())
