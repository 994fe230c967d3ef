"""Skeleton frame preprocessing.

A raw frame is 25 labeled 3D joint positions.  Preprocessing keeps 17 joints,
splits their coordinates into one vector per axis, and min-max scales each
vector into [0, 1].  The scaling makes the representation invariant to uniform
scaling and translation of the skeleton, so coordinates may arrive in any
metric unit.

All functions here are pure; they can be called from any number of workers.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import SkeletonValidationError
from .joints import DEFAULT_MASK, N_JOINTS, JointMask


class DegenerateAxisWarning(UserWarning):
    """An axis vector was constant, so its normalization is forced to 0.5."""


@dataclass(frozen=True)
class RawSkeleton:
    """One frame of 25 joint positions, in sensor coordinates.

    `joints` has shape (25, 3), one (x, y, z) triple per Kinect-2 joint index.
    """

    frame_index: int
    joints: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "joints", np.asarray(self.joints, dtype=float))
        validate_skeleton(self)


@dataclass(frozen=True)
class PostureTriplet:
    """Normalized per-axis posture vectors for one frame.

    Each vector has one component per kept joint and lies in [0, 1], reaching
    both endpoints unless that axis was degenerate (constant input, flagged).
    """

    frame_index: int
    x_axis: np.ndarray
    y_axis: np.ndarray
    z_axis: np.ndarray
    degenerate: tuple[bool, bool, bool] = (False, False, False)

    def stacked(self) -> np.ndarray:
        """The three axis vectors as a (3, n_kept) array, x/y/z row order."""
        return np.stack([self.x_axis, self.y_axis, self.z_axis])


def validate_skeleton(s: RawSkeleton) -> None:
    """Raise SkeletonValidationError unless `s` satisfies its invariants."""
    if s.joints.shape != (N_JOINTS, 3):
        raise SkeletonValidationError(
            f"expected joint array of shape ({N_JOINTS}, 3), got {s.joints.shape}",
            frame_index=s.frame_index,
        )
    if not np.all(np.isfinite(s.joints)):
        raise SkeletonValidationError(
            "joint coordinates contain NaN or infinity", frame_index=s.frame_index
        )
    if s.frame_index < 0:
        raise SkeletonValidationError(
            "frame index must be nonnegative", frame_index=s.frame_index
        )


def select_joints(s: RawSkeleton, mask: JointMask = DEFAULT_MASK) -> np.ndarray:
    """Keep the masked joints of one frame, preserving ascending-index order.

    Returns an array of shape (len(mask.kept), 3).
    """
    validate_skeleton(s)
    return s.joints[list(mask.kept)]


def split_axes(joints: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split (n, 3) joint triples into per-axis coordinate vectors."""
    joints = np.asarray(joints, dtype=float)
    if joints.ndim != 2 or joints.shape[1] != 3:
        raise ValueError(f"expected an (n, 3) joint array, got shape {joints.shape}")
    if not np.all(np.isfinite(joints)):
        raise ValueError("joint coordinates contain NaN or infinity")
    return joints[:, 0].copy(), joints[:, 1].copy(), joints[:, 2].copy()


def normalize_axis(v: np.ndarray) -> np.ndarray:
    """Min-max scale a coordinate vector into [0, 1].

    The minimum maps to exactly 0 and the maximum to exactly 1, so the
    pairwise ordering of components is preserved.  A constant vector has no
    range; it maps to all 0.5 and emits a DegenerateAxisWarning instead of
    failing, so one impossible posture cannot abort a batch run.
    """
    v = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError("axis vector contains NaN or infinity")
    lo = v.min()
    hi = v.max()
    if hi == lo:
        warnings.warn(
            "constant axis vector, normalizing to all 0.5", DegenerateAxisWarning
        )
        return np.full_like(v, 0.5)
    return (v - lo) / (hi - lo)


def preprocess_frame(s: RawSkeleton, mask: JointMask = DEFAULT_MASK) -> PostureTriplet:
    """Full per-frame preprocessing: joint selection, axis split, normalization."""
    kept = select_joints(s, mask)
    axes = split_axes(kept)
    out = []
    flags = []
    for v in axes:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", DegenerateAxisWarning)
            out.append(normalize_axis(v))
        flags.append(any(issubclass(w.category, DegenerateAxisWarning) for w in caught))
    if any(flags):
        warnings.warn(
            f"frame {s.frame_index}: degenerate constant axis", DegenerateAxisWarning
        )
    return PostureTriplet(
        frame_index=s.frame_index,
        x_axis=out[0],
        y_axis=out[1],
        z_axis=out[2],
        degenerate=tuple(flags),
    )


def preprocess_sequence(frames, mask: JointMask = DEFAULT_MASK) -> np.ndarray:
    """Preprocess a whole sequence into an (n_frames, 3, n_kept) array.

    `frames` is an iterable of RawSkeleton, or an (n_frames, 25, 3) /
    (n_frames, 75) coordinate array (frame indices then taken as 0..n-1).
    """
    if isinstance(frames, np.ndarray):
        arr = np.asarray(frames, dtype=float)
        if arr.ndim == 2 and arr.shape[1] == 3 * N_JOINTS:
            arr = arr.reshape(-1, N_JOINTS, 3)
        frames = [RawSkeleton(frame_index=i, joints=a) for i, a in enumerate(arr)]
    triplets = [preprocess_frame(f, mask) for f in frames]
    if not triplets:
        raise ValueError("cannot preprocess an empty sequence")
    return np.stack([t.stacked() for t in triplets])


class SkeletonPreprocessor(TransformerMixin, BaseEstimator):
    """Stateless transformer from raw skeleton frames to normalized axis vectors.

    Accepts an (n_frames, 25, 3) array or its flattened (n_frames, 75) form
    and returns (n_frames, 3 * n_kept) with the x, y and z axis vectors
    concatenated in that order.  Fitting is a no-op; the transform has no
    learned state, the estimator interface exists so the step composes with
    pipelines and parameter search.
    """

    def __init__(self, mask: JointMask = DEFAULT_MASK):
        self.mask = mask

    def fit(self, X, y=None):
        self._check_input(X)
        return self

    def transform(self, X) -> np.ndarray:
        frames = self._check_input(X)
        n = frames.shape[0]
        out = np.empty((n, 3 * self.mask.n_kept))
        for i in range(n):
            s = RawSkeleton(frame_index=i, joints=frames[i])
            out[i] = preprocess_frame(s, self.mask).stacked().ravel()
        return out

    def _check_input(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 2 and X.shape[1] == 3 * N_JOINTS:
            X = X.reshape(X.shape[0], N_JOINTS, 3)
        if X.ndim != 3 or X.shape[1:] != (N_JOINTS, 3):
            raise ValueError(
                f"expected (n, {N_JOINTS}, 3) or (n, {3 * N_JOINTS}) input, "
                f"got shape {X.shape}"
            )
        return X
