"""Visualization of first-hidden-layer units as joint-grid grayscale images.

Each of the 128 first-layer units has 17 incoming weights, one per kept
joint.  Per unit, the weights are min-max scaled to [0, 255] (a unit with
constant weights maps to mid-gray 128) and drawn at fixed body-shaped pixel
positions on a small grid: brighter pixel, larger weight.  Images go out as
ASCII portable graymaps; the raw full-precision weights go out as CSV so
the pictures are accompanied by exact numbers.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .autoencoder import SparseAutoencoder
from .joints import DEFAULT_MASK, JOINT_NAMES, JointMask

GRID_SHAPE = (11, 9)  # rows, cols

# joint id -> (row, col); a stick figure seen from the front
DEFAULT_LAYOUT = {
    3: (0, 4),    # Head
    20: (1, 4),   # SpineShoulder
    4: (1, 2),    # ShoulderLeft
    8: (1, 6),    # ShoulderRight
    5: (2, 1),    # ElbowLeft
    9: (2, 7),    # ElbowRight
    7: (3, 0),    # HandLeft
    11: (3, 8),   # HandRight
    0: (4, 4),    # SpineBase
    12: (5, 3),   # HipLeft
    16: (5, 5),   # HipRight
    13: (7, 3),   # KneeLeft
    17: (7, 5),   # KneeRight
    14: (9, 3),   # AnkleLeft
    18: (9, 5),   # AnkleRight
    15: (10, 2),  # FootLeft
    19: (10, 6),  # FootRight
}


def _first_layer(model: SparseAutoencoder) -> np.ndarray:
    if not getattr(model, "weights_", None):
        raise ValueError("model must be fitted before its filters can be drawn")
    return model.weights_[0]


def filter_images(
    model: SparseAutoencoder,
    layout: dict[int, tuple[int, int]] = DEFAULT_LAYOUT,
    mask: JointMask = DEFAULT_MASK,
) -> np.ndarray:
    """Render every first-layer unit; returns uint8 (n_units, rows, cols).

    Input component i of the model is taken to be kept joint i of `mask`
    (ascending joint-id order, the standard pipeline layout); background
    pixels are 0.
    """
    weights = _first_layer(model)
    if weights.shape[1] != len(mask.kept):
        raise ValueError(
            f"model input width {weights.shape[1]} does not match the "
            f"{len(mask.kept)}-joint mask"
        )
    missing = [j for j in mask.kept if j not in layout]
    if missing:
        raise ValueError(f"layout lacks positions for joints {missing}")

    lo = weights.min(axis=1, keepdims=True)
    hi = weights.max(axis=1, keepdims=True)
    span = hi - lo
    flat = span[:, 0] == 0.0
    with np.errstate(invalid="ignore", divide="ignore"):
        scaled = np.rint((weights - lo) / span * 255.0)
    scaled[flat] = 128.0

    images = np.zeros((weights.shape[0],) + GRID_SHAPE, dtype=np.uint8)
    for i, joint in enumerate(mask.kept):
        r, c = layout[joint]
        images[:, r, c] = scaled[:, i].astype(np.uint8)
    return images


def write_pgm(image: np.ndarray, path: str | Path) -> Path:
    """Write one grayscale image as an ASCII (P2) portable graymap."""
    path = Path(path)
    rows, cols = image.shape
    lines = ["P2", f"{cols} {rows}", "255"]
    lines += [" ".join(str(int(v)) for v in row) for row in image]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_pgm(path: str | Path) -> np.ndarray:
    tokens = Path(path).read_text(encoding="utf-8").split()
    if tokens[0] != "P2":
        raise ValueError(f"{path} is not an ASCII portable graymap")
    cols, rows, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    if maxval != 255:
        raise ValueError("expected 8-bit graymap")
    values = np.array(tokens[4:], dtype=np.uint8)
    return values.reshape(rows, cols)


def export_filters(
    model: SparseAutoencoder,
    directory: str | Path,
    layout: dict[int, tuple[int, int]] = DEFAULT_LAYOUT,
    mask: JointMask = DEFAULT_MASK,
) -> list[Path]:
    """Write unit_NNN.pgm for every unit plus weights.csv with exact values."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    images = filter_images(model, layout=layout, mask=mask)
    paths = []
    for n, image in enumerate(images):
        paths.append(write_pgm(image, directory / f"unit_{n:03d}.pgm"))
    paths.append(write_weights_csv(model, directory / "weights.csv", mask=mask))
    return paths


def write_weights_csv(
    model: SparseAutoencoder,
    path: str | Path,
    mask: JointMask = DEFAULT_MASK,
) -> Path:
    """First-layer weights, one row per unit, full shortest-round-trip floats."""
    weights = _first_layer(model)
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["unit"] + [JOINT_NAMES[j] for j in mask.kept])
        for n, row in enumerate(weights):
            writer.writerow([n] + [repr(v) for v in row.tolist()])
    return path


def read_weights_csv(path: str | Path) -> np.ndarray:
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        rows = [[float(v) for v in row[1:]] for row in reader]
    return np.array(rows)
