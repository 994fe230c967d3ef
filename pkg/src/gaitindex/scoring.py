"""Abnormality index: per-axis error fusion and temporal aggregation.

Each of the three axis auto-encoders yields a per-frame reconstruction error.
The frame index is their weighted sum, with weights inversely proportional to
each model's training-set error,

    w_k = (e_X + e_Y + e_Z) / e_k,

so a model that reconstructed its training data well counts for more, and the
weight ratio of any two models is the inverse of their error ratio.  An
unweighted mode (plain sum) is kept for comparison.  Per-segment and
per-sequence indices are means of the per-frame index over non-overlapping
windows and over the whole sequence.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .autoencoder import SparseAutoencoder, TrainConfig, DEFAULT_HIDDEN_DIMS
from .errors import DegenerateTrainingError

AXES = ("X", "Y", "Z")
MODES = ("weighted", "unweighted")


def fusion_weights(e_x: float, e_y: float, e_z: float) -> tuple[float, float, float]:
    """Per-axis fusion weights from training-set MSEs.

    Each weight is the sum of the three errors divided by that axis's own
    error.  All errors must be strictly positive; a zero training error
    means training degenerated and would demand an infinite weight.
    """
    errors = (e_x, e_y, e_z)
    if any(not np.isfinite(e) for e in errors):
        raise ValueError("training errors must be finite")
    if any(e < 0 for e in errors):
        raise ValueError("training errors must be nonnegative")
    if any(e == 0 for e in errors):
        raise DegenerateTrainingError(
            "an axis model has zero training error; fusion weights are undefined"
        )
    total = e_x + e_y + e_z
    return (total / e_x, total / e_y, total / e_z)


def fuse_errors(
    errors: np.ndarray, weights: tuple[float, float, float], mode: str = "weighted"
) -> np.ndarray:
    """Combine per-axis errors (..., 3) into a scalar index per frame."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    errors = np.asarray(errors, dtype=float)
    if errors.shape[-1] != 3:
        raise ValueError("expected per-axis errors with last dimension 3")
    if mode == "weighted":
        return errors @ np.asarray(weights, dtype=float)
    return errors.sum(axis=-1)


@dataclass(frozen=True)
class IndexSeries:
    """Per-frame abnormality indices of one sequence plus their aggregates.

    per_segment holds the mean index of consecutive non-overlapping windows
    of segment_length frames; a final partial window is kept at its true
    size so every frame contributes.  per_sequence is the mean over all
    frames.
    """

    per_frame: np.ndarray
    segment_length: int
    per_segment: np.ndarray = field(init=False)
    per_sequence: float = field(init=False)

    def __post_init__(self):
        frames = np.asarray(self.per_frame, dtype=float)
        if frames.ndim != 1 or frames.size == 0:
            raise ValueError("per_frame must be a nonempty 1D array")
        if self.segment_length < 1:
            raise ValueError("segment_length must be >= 1")
        object.__setattr__(self, "per_frame", frames)
        segments = [
            frames[i : i + self.segment_length].mean()
            for i in range(0, frames.size, self.segment_length)
        ]
        object.__setattr__(self, "per_segment", np.asarray(segments))
        object.__setattr__(self, "per_sequence", float(frames.mean()))


def aggregate(per_frame, segment_length: int = 20) -> IndexSeries:
    """Windowed and whole-sequence means of a per-frame index series."""
    return IndexSeries(per_frame=np.asarray(per_frame, dtype=float), segment_length=segment_length)


class GaitAnomalyScorer(BaseEstimator):
    """Three per-axis sparse auto-encoders fused into one abnormality score.

    fit() expects preprocessed normal-gait postures, either as
    (n_frames, 3, n_components) stacked axis vectors or the flattened
    (n_frames, 3 * n_components) layout produced by SkeletonPreprocessor.
    It trains one SparseAutoencoder per axis (seeded independently from
    `seed`) and derives the fusion weights from their training errors.

    score_frames() returns the per-frame abnormality index of new postures;
    higher means further from the learned normal-walking manifold.
    """

    def __init__(
        self,
        hidden_dims: tuple[int, ...] = DEFAULT_HIDDEN_DIMS,
        rho: float = 0.05,
        sparsity_weight: float = 0.1,
        l2_weight: float = 1e-4,
        learning_rate: float = 1e-3,
        batch_size: int = 64,
        epochs: int = 200,
        momentum: float = 0.0,
        seed: int = 0,
    ):
        self.hidden_dims = hidden_dims
        self.rho = rho
        self.sparsity_weight = sparsity_weight
        self.l2_weight = l2_weight
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.epochs = epochs
        self.momentum = momentum
        self.seed = seed

    @classmethod
    def from_config(cls, config: TrainConfig, hidden_dims=DEFAULT_HIDDEN_DIMS):
        return cls(hidden_dims=hidden_dims, **config.to_dict())

    @classmethod
    def from_models(cls, model_x, model_y, model_z) -> "GaitAnomalyScorer":
        """Assemble a scorer from three already-fitted axis models."""
        models = (model_x, model_y, model_z)
        for m in models:
            if getattr(m, "train_mse_", None) is None:
                raise NotFittedError("axis models must be fitted, with train_mse_ set")
        est = cls(
            hidden_dims=model_x.hidden_dims,
            rho=model_x.rho,
            sparsity_weight=model_x.sparsity_weight,
            l2_weight=model_x.l2_weight,
            learning_rate=model_x.learning_rate,
            batch_size=model_x.batch_size,
            epochs=model_x.epochs,
            momentum=model_x.momentum,
            seed=model_x.seed,
        )
        est.model_x_, est.model_y_, est.model_z_ = models
        est._finalize_weights()
        return est

    # ------------------------------------------------------------------

    def fit(self, X, y=None) -> "GaitAnomalyScorer":
        X = self._check_X(X)
        models = []
        for axis, tag in enumerate(AXES):
            model = SparseAutoencoder(
                hidden_dims=self.hidden_dims,
                rho=self.rho,
                sparsity_weight=self.sparsity_weight,
                l2_weight=self.l2_weight,
                learning_rate=self.learning_rate,
                batch_size=self.batch_size,
                epochs=self.epochs,
                momentum=self.momentum,
                seed=self.seed + axis,
                axis_tag=tag,
            )
            model.fit(X[:, axis, :])
            models.append(model)
        self.model_x_, self.model_y_, self.model_z_ = models
        self._finalize_weights()
        return self

    def _finalize_weights(self):
        self.train_errors_ = tuple(m.train_mse_ for m in self.models_)
        self.weights_ = fusion_weights(*self.train_errors_)
        self.n_components_ = self.models_[0].n_features_in_

    @property
    def models_(self) -> tuple[SparseAutoencoder, ...]:
        self._require_fitted()
        return (self.model_x_, self.model_y_, self.model_z_)

    def _require_fitted(self):
        if not hasattr(self, "model_x_"):
            raise NotFittedError("this GaitAnomalyScorer instance is not fitted yet")

    # ------------------------------------------------------------------

    def axis_errors(self, X) -> np.ndarray:
        """Per-frame reconstruction MSE of each axis model, shape (n, 3)."""
        X = self._check_X(X)
        cols = [m.reconstruction_errors(X[:, axis, :]) for axis, m in enumerate(self.models_)]
        return np.stack(cols, axis=1)

    def score_frames(self, X, mode: str = "weighted") -> np.ndarray:
        """Abnormality index per frame; higher means more abnormal."""
        return fuse_errors(self.axis_errors(X), self.weights_, mode=mode)

    def score_sequence(
        self, X, mode: str = "weighted", segment_length: int = 20
    ) -> IndexSeries:
        """Per-frame indices of one sequence with segment/sequence aggregates."""
        return aggregate(self.score_frames(X, mode=mode), segment_length=segment_length)

    def _check_X(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 2 and X.shape[1] % 3 == 0:
            X = X.reshape(X.shape[0], 3, X.shape[1] // 3)
        if X.ndim != 3 or X.shape[1] != 3:
            raise ValueError(
                "expected (n_frames, 3, n_components) stacked axis vectors or "
                f"their flattened 2D layout, got shape {np.asarray(X).shape}"
            )
        return X
