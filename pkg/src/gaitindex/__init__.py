"""Skeleton-based gait abnormality scoring.

The pipeline: validate 25-joint skeleton frames, keep 17 joints and
normalize each axis to [0, 1]; train one sparse auto-encoder per axis on
normal walking only; fuse the three reconstruction errors into a per-frame
abnormality index, aggregated over segments and sequences; evaluate with
ROC/AUC/EER and the derived confusion metrics.
"""

from .autoencoder import (
    BatchStats,
    DEFAULT_HIDDEN_DIMS,
    SparseAutoencoder,
    TrainConfig,
    kl_sparsity,
)
from .errors import (
    DegenerateTrainingError,
    GaitIndexError,
    NumericError,
    SequenceFormatError,
    SingleClassError,
    SkeletonValidationError,
    TrainingDivergedError,
)
from .experiment import (
    ExperimentSplit,
    default_manifest,
    load_manifest,
    run_experiment,
)
from .filters import DEFAULT_LAYOUT, export_filters, filter_images
from .io import (
    DatasetEntry,
    GaitSequence,
    load_dataset_manifest,
    load_model,
    load_scorer,
    load_sequence,
    save_model,
    save_scorer,
    write_dataset_manifest,
    write_sequence,
)
from .joints import DEFAULT_MASK, JOINT_INDEX, JOINT_NAMES, JointMask, N_JOINTS, N_KEPT
from .metrics import (
    ABNORMAL,
    LabeledScore,
    MetricReport,
    NORMAL,
    RocCurve,
    confusion_counts,
    evaluate,
    format_report_table,
    report_at_eer,
    roc,
)
from .preprocess import (
    DegenerateAxisWarning,
    PostureTriplet,
    RawSkeleton,
    SkeletonPreprocessor,
    normalize_axis,
    preprocess_frame,
    preprocess_sequence,
)
from .scoring import (
    AXES,
    GaitAnomalyScorer,
    IndexSeries,
    aggregate,
    fuse_errors,
    fusion_weights,
)
from .synth import FPS, GaitAmplitudes, SynthConfig, parse_abnormality, subject_config, synth_gait

__version__ = "0.1.0"

__all__ = [
    "ABNORMAL",
    "AXES",
    "BatchStats",
    "DEFAULT_HIDDEN_DIMS",
    "DEFAULT_LAYOUT",
    "DEFAULT_MASK",
    "DatasetEntry",
    "DegenerateAxisWarning",
    "DegenerateTrainingError",
    "ExperimentSplit",
    "FPS",
    "GaitAmplitudes",
    "GaitAnomalyScorer",
    "GaitIndexError",
    "GaitSequence",
    "IndexSeries",
    "JOINT_INDEX",
    "JOINT_NAMES",
    "JointMask",
    "LabeledScore",
    "MetricReport",
    "N_JOINTS",
    "N_KEPT",
    "NORMAL",
    "NumericError",
    "PostureTriplet",
    "RawSkeleton",
    "RocCurve",
    "SequenceFormatError",
    "SingleClassError",
    "SkeletonPreprocessor",
    "SkeletonValidationError",
    "SparseAutoencoder",
    "SynthConfig",
    "TrainConfig",
    "TrainingDivergedError",
    "aggregate",
    "confusion_counts",
    "default_manifest",
    "evaluate",
    "export_filters",
    "filter_images",
    "format_report_table",
    "fuse_errors",
    "fusion_weights",
    "kl_sparsity",
    "load_dataset_manifest",
    "load_manifest",
    "load_model",
    "load_scorer",
    "load_sequence",
    "normalize_axis",
    "parse_abnormality",
    "preprocess_frame",
    "preprocess_sequence",
    "report_at_eer",
    "roc",
    "run_experiment",
    "save_model",
    "save_scorer",
    "subject_config",
    "synth_gait",
    "write_dataset_manifest",
    "write_sequence",
]
