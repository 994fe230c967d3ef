"""File formats: sequence CSV, dataset manifest, model JSON, index outputs.

Sequence CSV (one file per gait sequence): header line
`frame,j0x,j0y,j0z,...,j24x,j24y,j24z`, one row per frame, UTF-8, decimal
point, frame numbers consecutive and ascending.  Subject id and label are
not part of the CSV; they live in the dataset manifest JSON next to the
files.

All floating-point numbers are written with Python's shortest round-trip
representation, so save/load cycles reproduce values bit for bit.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .autoencoder import SparseAutoencoder, TrainConfig
from .errors import SequenceFormatError
from .joints import N_JOINTS
from .preprocess import RawSkeleton
from .scoring import AXES, GaitAnomalyScorer, IndexSeries

FORMAT_VERSION = 1

SEQUENCE_HEADER = ["frame"] + [
    f"j{j}{c}" for j in range(N_JOINTS) for c in ("x", "y", "z")
]

LABEL_NORMAL = "normal"
LABEL_ABNORMAL = "abnormal"


@dataclass
class GaitSequence:
    """An ordered run of skeleton frames from one subject walking one gait."""

    subject_id: str
    label: str
    frames: list[RawSkeleton]
    variant: str = ""

    def __post_init__(self):
        if not self.frames:
            raise ValueError("a gait sequence must contain at least one frame")
        indices = [f.frame_index for f in self.frames]
        if any(b - a != 1 for a, b in zip(indices, indices[1:])):
            raise ValueError("frame indices must be consecutive and ascending")

    def joint_array(self) -> np.ndarray:
        """All frames stacked into an (n_frames, 25, 3) array."""
        return np.stack([f.joints for f in self.frames])

    @property
    def sequence_id(self) -> str:
        return f"{self.subject_id}_{self.variant or self.label}"


# ----------------------------------------------------------------------
# sequence CSV

def write_sequence(seq: GaitSequence, path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SEQUENCE_HEADER)
        for f in seq.frames:
            writer.writerow([f.frame_index] + [repr(v) for v in f.joints.ravel().tolist()])
    return path


def load_sequence(
    path: str | Path,
    subject_id: str | None = None,
    label: str = LABEL_NORMAL,
    variant: str = "",
) -> GaitSequence:
    """Parse and validate a sequence CSV.

    Metadata (subject id, label) is supplied by the caller, normally from
    the dataset manifest; subject_id defaults to the file stem.
    """
    path = Path(path)
    frames: list[RawSkeleton] = []
    expected_cols = len(SEQUENCE_HEADER)
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SequenceFormatError("file is empty", line=1) from None
        if header != SEQUENCE_HEADER:
            raise SequenceFormatError(
                f"bad header, expected {expected_cols} columns starting with "
                "'frame,j0x,j0y,j0z'",
                line=1,
            )
        previous = None
        for line_no, row in enumerate(reader, start=2):
            if len(row) != expected_cols:
                raise SequenceFormatError(
                    f"expected {expected_cols} columns, got {len(row)}", line=line_no
                )
            try:
                frame_index = int(row[0])
                coords = np.array([float(v) for v in row[1:]]).reshape(N_JOINTS, 3)
            except ValueError as exc:
                raise SequenceFormatError(str(exc), line=line_no) from None
            if not np.all(np.isfinite(coords)):
                raise SequenceFormatError(
                    "non-finite joint coordinate", line=line_no
                )
            if previous is not None and frame_index != previous + 1:
                raise SequenceFormatError(
                    f"frame numbers must be consecutive ascending; "
                    f"{previous} followed by {frame_index}",
                    line=line_no,
                )
            previous = frame_index
            frames.append(RawSkeleton(frame_index=frame_index, joints=coords))
    if not frames:
        raise SequenceFormatError("file contains no frames", line=2)
    return GaitSequence(
        subject_id=subject_id if subject_id is not None else path.stem,
        label=label,
        variant=variant,
        frames=frames,
    )


# ----------------------------------------------------------------------
# dataset manifest

@dataclass
class DatasetEntry:
    file: str
    subject_id: str
    label: str
    variant: str = ""
    role: str = "test"  # "train" or "test"


def write_dataset_manifest(entries: list[DatasetEntry], path: str | Path, seed=None) -> Path:
    path = Path(path)
    payload = {
        "format_version": FORMAT_VERSION,
        "kind": "gaitindex-dataset",
        "seed": seed,
        "sequences": [vars(e) for e in entries],
    }
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return path


def load_dataset_manifest(path: str | Path) -> list[DatasetEntry]:
    path = Path(path)
    payload = json.loads(path.read_text(encoding="utf-8"))
    if payload.get("kind") != "gaitindex-dataset":
        raise ValueError(f"{path} is not a dataset manifest")
    return [DatasetEntry(**e) for e in payload["sequences"]]


def load_dataset_sequences(path: str | Path, role: str | None = None) -> list[GaitSequence]:
    """Load every sequence listed in a manifest, optionally one role only."""
    path = Path(path)
    sequences = []
    for entry in load_dataset_manifest(path):
        if role is not None and entry.role != role:
            continue
        sequences.append(
            load_sequence(
                path.parent / entry.file,
                subject_id=entry.subject_id,
                label=entry.label,
                variant=entry.variant,
            )
        )
    return sequences


# ----------------------------------------------------------------------
# model files

def save_model(
    model: SparseAutoencoder,
    path: str | Path,
    component_names: tuple[str, ...] | None = None,
) -> Path:
    """Write a fitted axis model as versioned JSON.

    component_names records which joint each input component refers to
    (ascending Kinect-2 index order in the standard pipeline), making the
    trained model unambiguous about its input layout.
    """
    if getattr(model, "train_mse_", None) is None:
        raise ValueError("only fitted models with a training MSE can be saved")
    path = Path(path)
    payload = {
        "format_version": FORMAT_VERSION,
        "kind": "gaitindex-axis-model",
        "axis_tag": model.axis_tag,
        "topology": {
            "dims": list(model.dims_),
            "activations": list(model.activations_),
        },
        "weights": [W.tolist() for W in model.weights_],
        "biases": [b.tolist() for b in model.biases_],
        "train_mse": float(model.train_mse_),
        "train_config": model.train_config.to_dict(),
        "seed": model.seed,
        "component_names": list(component_names) if component_names else None,
    }
    path.write_text(json.dumps(payload) + "\n", encoding="utf-8")
    return path


def load_model(path: str | Path) -> SparseAutoencoder:
    path = Path(path)
    payload = json.loads(path.read_text(encoding="utf-8"))
    if payload.get("kind") != "gaitindex-axis-model":
        raise ValueError(f"{path} is not an axis-model file")
    if payload["format_version"] > FORMAT_VERSION:
        raise ValueError(
            f"model format version {payload['format_version']} is newer than "
            f"this library supports ({FORMAT_VERSION})"
        )
    cfg = TrainConfig(**payload["train_config"])
    model = SparseAutoencoder.from_parameters(
        weights=[np.array(W) for W in payload["weights"]],
        biases=[np.array(b) for b in payload["biases"]],
        train_mse=payload["train_mse"],
        axis_tag=payload["axis_tag"],
        **cfg.to_dict(),
    )
    declared_dims = payload["topology"]["dims"]
    if model.dims_ != list(declared_dims):
        raise ValueError(f"weight shapes disagree with declared dims {declared_dims}")
    if list(model.activations_) != payload["topology"]["activations"]:
        raise ValueError("activation names disagree with the model's depth rule")
    return model


def save_scorer(
    scorer: GaitAnomalyScorer,
    directory: str | Path,
    component_names: tuple[str, ...] | None = None,
) -> Path:
    """Write the three axis models plus a bundle file with the fusion weights."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    model_files = {}
    for tag, model in zip(AXES, scorer.models_):
        name = f"model_{tag.lower()}.json"
        save_model(model, directory / name, component_names=component_names)
        model_files[tag] = name
    payload = {
        "format_version": FORMAT_VERSION,
        "kind": "gaitindex-scorer",
        "models": model_files,
        "train_errors": dict(zip(AXES, [float(e) for e in scorer.train_errors_])),
        "fusion_weights": dict(zip(AXES, [float(w) for w in scorer.weights_])),
    }
    bundle = directory / "scorer.json"
    bundle.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return bundle


def load_scorer(path: str | Path) -> GaitAnomalyScorer:
    """Load a scorer bundle; `path` is the bundle file or its directory."""
    path = Path(path)
    if path.is_dir():
        path = path / "scorer.json"
    payload = json.loads(path.read_text(encoding="utf-8"))
    if payload.get("kind") != "gaitindex-scorer":
        raise ValueError(f"{path} is not a scorer bundle")
    models = [load_model(path.parent / payload["models"][tag]) for tag in AXES]
    scorer = GaitAnomalyScorer.from_models(*models)
    saved = [payload["fusion_weights"][tag] for tag in AXES]
    if not np.allclose(saved, scorer.weights_, rtol=1e-12, atol=0.0):
        raise ValueError("bundle fusion weights disagree with the model errors")
    return scorer


# ----------------------------------------------------------------------
# index outputs

def write_index_outputs(
    series_by_mode: dict[str, IndexSeries],
    axis_errors: np.ndarray,
    weights: tuple[float, float, float],
    sequence_id: str,
    directory: str | Path,
    first_frame: int = 0,
    mode: str = "weighted",
) -> tuple[Path, Path]:
    """Write `frame,index` CSV plus a companion JSON with the full detail.

    The CSV carries the per-frame index of `mode`; the JSON additionally
    holds both fusion modes, the per-axis error traces, the fusion weights
    and the segment/sequence aggregates, which is everything a later
    evaluation pass needs.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    series = series_by_mode[mode]

    csv_path = directory / f"{sequence_id}.csv"
    with csv_path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frame", "index"])
        for i, value in enumerate(series.per_frame.tolist()):
            writer.writerow([first_frame + i, repr(value)])

    axis_errors = np.asarray(axis_errors, dtype=float)
    payload = {
        "format_version": FORMAT_VERSION,
        "kind": "gaitindex-scores",
        "sequence_id": sequence_id,
        "mode": mode,
        "fusion_weights": dict(zip(AXES, [float(w) for w in weights])),
        "segment_length": series.segment_length,
        "axis_errors": {
            tag: axis_errors[:, i].tolist() for i, tag in enumerate(AXES)
        },
        "per_frame": {
            m: s.per_frame.tolist() for m, s in series_by_mode.items()
        },
        "per_segment": {
            m: s.per_segment.tolist() for m, s in series_by_mode.items()
        },
        "per_sequence": {m: s.per_sequence for m, s in series_by_mode.items()},
    }
    json_path = directory / f"{sequence_id}.json"
    json_path.write_text(json.dumps(payload) + "\n", encoding="utf-8")
    return csv_path, json_path


def load_index_outputs(path: str | Path) -> dict:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("kind") != "gaitindex-scores":
        raise ValueError(f"{path} is not a score file")
    return payload


# ----------------------------------------------------------------------

def sha256_of(path: str | Path) -> str:
    digest = hashlib.sha256()
    digest.update(Path(path).read_bytes())
    return digest.hexdigest()
