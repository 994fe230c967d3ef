"""Command-line interface.

Subcommands cover the pipeline stages: `synth` emits a dataset, `train`
fits the three axis models, `score` turns a sequence into an abnormality
index, `eval` computes metric reports from scored sequences, and
`inspect-filters` renders a model's first-layer units.  `run` performs the
whole train-score-evaluate experiment from one manifest.

Operational failures exit nonzero and print a single JSON object to
stderr: {"error": {"type": ..., "message": ..., ...}} with extra fields
(line, frame_index, last_good_epoch) when the exception carries them.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np
from sklearn.exceptions import NotFittedError

from .autoencoder import TrainConfig
from .errors import GaitIndexError
from .experiment import (
    ExperimentSplit,
    assemble_training_set,
    default_manifest,
    load_manifest,
    materialize_synth_dataset,
    run_experiment,
    validate_manifest,
    REPORT_ROWS,
    ROW_LABELS,
    _collect_row_scores,
    _write_reports,
)
from .filters import export_filters
from .io import (
    load_dataset_manifest,
    load_index_outputs,
    load_model,
    load_scorer,
    load_sequence,
    save_scorer,
    write_index_outputs,
)
from .joints import DEFAULT_MASK, JOINT_NAMES
from .metrics import evaluate
from .preprocess import preprocess_sequence
from .scoring import AXES, GaitAnomalyScorer, IndexSeries, fuse_errors

_CONFIG_FLAGS = (
    "rho", "sparsity_weight", "l2_weight", "learning_rate",
    "batch_size", "epochs", "momentum", "seed",
)


def _error_payload(exc: BaseException) -> dict:
    info = {"type": type(exc).__name__, "message": str(exc)}
    for attr in ("line", "frame_index", "last_good_epoch"):
        value = getattr(exc, attr, None)
        if value is not None:
            info[attr] = value
    return {"error": info}


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("training overrides")
    group.add_argument("--rho", type=float)
    group.add_argument("--sparsity-weight", type=float)
    group.add_argument("--l2-weight", type=float)
    group.add_argument("--learning-rate", type=float)
    group.add_argument("--batch-size", type=int)
    group.add_argument("--epochs", type=int)
    group.add_argument("--momentum", type=float)
    group.add_argument("--seed", type=int)


def _apply_overrides(config: dict, args: argparse.Namespace) -> dict:
    for key in _CONFIG_FLAGS:
        value = getattr(args, key, None)
        if value is not None:
            config[key] = value
    return config


def _resolve_manifest(args: argparse.Namespace) -> dict:
    if args.manifest:
        manifest = load_manifest(args.manifest)
    else:
        manifest = default_manifest()
    if getattr(args, "seed", None) is not None:
        manifest["seed"] = args.seed
    if getattr(args, "segment_length", None) is not None:
        manifest["segment_length"] = args.segment_length
    manifest["train_config"] = _apply_overrides(dict(manifest["train_config"]), args)
    validate_manifest(manifest)
    return manifest


# ----------------------------------------------------------------------
# subcommands

def _cmd_synth(args) -> int:
    manifest = _resolve_manifest(args)
    if "synth" not in manifest["dataset"]:
        raise GaitIndexError("manifest has a file-based dataset; nothing to synthesize")
    entries, _ = materialize_synth_dataset(manifest, Path(args.outdir))
    print(f"wrote {len(entries)} sequences to {args.outdir}")
    return 0


def _cmd_train(args) -> int:
    entries = load_dataset_manifest(args.dataset)
    dataset_dir = Path(args.dataset).parent
    train_entries = [e for e in entries if e.role == "train"]
    test_subjects = sorted({e.subject_id for e in entries if e.role == "test"})
    if not train_entries:
        raise GaitIndexError("dataset has no sequences with role 'train'")
    split = ExperimentSplit(
        tuple(sorted({e.subject_id for e in train_entries})),
        tuple(test_subjects),
    )
    sequences = [
        load_sequence(dataset_dir / e.file, subject_id=e.subject_id,
                      label=e.label, variant=e.variant)
        for e in train_entries
    ]
    X = assemble_training_set(sequences, split)
    cfg = TrainConfig(**_apply_overrides(TrainConfig().to_dict(), args))
    scorer = GaitAnomalyScorer(**cfg.to_dict())
    scorer.fit(X)
    bundle = save_scorer(
        scorer, args.outdir,
        component_names=tuple(JOINT_NAMES[j] for j in DEFAULT_MASK.kept),
    )
    weights = ", ".join(
        f"w_{t}={w:.4f}" for t, w in zip(AXES, scorer.weights_)
    )
    print(f"trained on {X.shape[0]} frames; {weights}; bundle at {bundle}")
    return 0


def _cmd_score(args) -> int:
    scorer = load_scorer(args.models)
    seq = load_sequence(args.input)
    frames = preprocess_sequence(seq.joint_array())
    errors = scorer.axis_errors(frames)
    series = {
        mode: IndexSeries(
            per_frame=fuse_errors(errors, scorer.weights_, mode=mode),
            segment_length=args.segment_length,
        )
        for mode in ("unweighted", "weighted")
    }
    # name outputs after the input file so `eval` can pair them with the
    # dataset manifest entries
    csv_path, json_path = write_index_outputs(
        series, errors, tuple(scorer.weights_),
        Path(args.input).stem, args.outdir,
        first_frame=seq.frames[0].frame_index,
    )
    value = series["weighted"].per_sequence
    print(f"sequence index {value:.6g}; wrote {csv_path} and {json_path}")
    return 0


def _cmd_eval(args) -> int:
    entries = {e.file: e for e in load_dataset_manifest(args.dataset)}
    scores_dir = Path(args.scores)
    scored = {}
    for entry in entries.values():
        if entry.role != "test":
            continue
        stem = Path(entry.file).stem
        payload_path = scores_dir / f"{stem}.json"
        if not payload_path.exists():
            raise GaitIndexError(f"missing score file for test sequence: {payload_path}")
        payload = load_index_outputs(payload_path)
        errors = [payload["axis_errors"][tag] for tag in AXES]
        scored[stem] = {
            "label": entry.label,
            "first_frame": 0,
            "axis_errors": np.array(errors).T,
            "series": {
                mode: IndexSeries(
                    per_frame=np.array(payload["per_frame"][mode]),
                    segment_length=payload["segment_length"],
                )
                for mode in ("unweighted", "weighted")
            },
        }
    if not scored:
        raise GaitIndexError("no test sequences found to evaluate")
    rows = _collect_row_scores(scored)
    reports, curves = {}, {}
    for key, labeled in rows.items():
        curve, report = evaluate(labeled)
        reports[key] = report
        curves[key] = curve
    _write_reports(reports, curves, Path(args.outdir))
    for signal, granularity in REPORT_ROWS:
        r = reports[(signal, granularity)]
        print(f"{ROW_LABELS[signal]} ({granularity}): AUC {r.auc:.4f}, EER {r.eer:.4f}")
    return 0


def _cmd_inspect_filters(args) -> int:
    model = load_model(args.model)
    paths = export_filters(model, args.outdir)
    print(f"wrote {len(paths) - 1} unit images and weights.csv to {args.outdir}")
    return 0


def _cmd_run(args) -> int:
    manifest = _resolve_manifest(args)
    result = run_experiment(manifest, args.outdir, base_dir=args.base_dir)
    for signal, granularity in REPORT_ROWS:
        r = result.reports[(signal, granularity)]
        print(f"{ROW_LABELS[signal]} ({granularity}): AUC {r.auc:.4f}, EER {r.eer:.4f}")
    print(f"outputs in {result.outdir}")
    return 0


# ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaitindex",
        description="Skeleton gait abnormality index: synthesize, train, score, evaluate.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset from a manifest")
    p.add_argument("--manifest", help="experiment manifest JSON (default: stock manifest)")
    p.add_argument("--outdir", required=True)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("train", help="train the three axis models on normal sequences")
    p.add_argument("--dataset", required=True, help="dataset manifest JSON")
    p.add_argument("--outdir", required=True, help="directory for the model bundle")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("score", help="score one sequence with a trained bundle")
    p.add_argument("--models", required=True, help="scorer bundle file or its directory")
    p.add_argument("--input", required=True, help="sequence CSV")
    p.add_argument("--outdir", required=True)
    p.add_argument("--segment-length", type=int, default=20)
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("eval", help="metric reports from scored test sequences")
    p.add_argument("--scores", required=True, help="directory of score JSON files")
    p.add_argument("--dataset", required=True, help="dataset manifest with labels")
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("inspect-filters", help="render first-layer units as graymaps")
    p.add_argument("--model", required=True, help="axis model JSON")
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=_cmd_inspect_filters)

    p = sub.add_parser("run", help="full experiment from a manifest")
    p.add_argument("--manifest", help="experiment manifest JSON (default: stock manifest)")
    p.add_argument("--outdir", required=True)
    p.add_argument("--base-dir", help="base for relative dataset paths in the manifest")
    p.add_argument("--segment-length", type=int)
    _add_config_flags(p)
    p.set_defaults(func=_cmd_run)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GaitIndexError, NotFittedError, OSError, ValueError) as exc:
        print(json.dumps(_error_payload(exc)), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
