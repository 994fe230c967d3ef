"""One-class evaluation: ROC curve, AUC, EER, and confusion metrics at EER.

Scores are abnormality indices (higher = more abnormal) and the abnormal
class is the positive one.  The ROC sweep visits every distinct score as a
threshold with the decision rule "score >= threshold means abnormal", so the
curve runs from (0, 0) to (1, 1) with nondecreasing false-positive rate.
AUC is the trapezoidal area, which equals the probability that a random
abnormal score ranks above a random normal one (ties counting one half).
The EER is read off the curve by linear interpolation between the two points
bracketing the fpr = 1 - tpr crossing, which is stabler than snapping to the
nearest point when the test set is small.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingleClassError

NORMAL = "normal"
ABNORMAL = "abnormal"


@dataclass(frozen=True)
class LabeledScore:
    """One score with its ground-truth label ('normal' or 'abnormal')."""

    score: float
    label: str

    def __post_init__(self):
        if self.label not in (NORMAL, ABNORMAL):
            raise ValueError(f"label must be '{NORMAL}' or '{ABNORMAL}', got {self.label!r}")
        if not np.isfinite(self.score):
            raise ValueError("score must be finite")


@dataclass(frozen=True)
class RocCurve:
    """Threshold-swept ROC points with the derived AUC and EER.

    points[i] = (fpr, tpr); the first point is (0, 0), the last (1, 1).
    eer_threshold is the achievable threshold whose operating point lies
    closest to the fpr = 1 - tpr crossing.
    """

    points: tuple[tuple[float, float], ...]
    thresholds: tuple[float, ...]
    auc: float
    eer: float
    eer_threshold: float


@dataclass(frozen=True)
class MetricReport:
    """Confusion metrics at the EER threshold plus the ranking metrics.

    If no sample is predicted abnormal, precision is undefined; it is
    reported as 0 with `precision_undefined` set.
    """

    auc: float
    eer: float
    sensitivity: float
    specificity: float
    precision: float
    accuracy: float
    f1: float
    tp: int
    fp: int
    tn: int
    fn: int
    threshold: float
    precision_undefined: bool = False

    def to_dict(self) -> dict:
        return {
            "auc": self.auc,
            "eer": self.eer,
            "sensitivity": self.sensitivity,
            "specificity": self.specificity,
            "precision": self.precision,
            "accuracy": self.accuracy,
            "f1": self.f1,
            "counts": {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn},
            "threshold": self.threshold,
            "precision_undefined": self.precision_undefined,
        }


def _split_scores(scores) -> tuple[np.ndarray, np.ndarray]:
    """Validate labeled scores and split them into (normal, abnormal) arrays."""
    normal, abnormal = [], []
    for item in scores:
        if isinstance(item, LabeledScore):
            score, label = item.score, item.label
        else:
            score, label = item
            LabeledScore(float(score), label)  # runs the validity checks
        (abnormal if label == ABNORMAL else normal).append(float(score))
    if not normal or not abnormal:
        raise SingleClassError(
            "ROC evaluation needs at least one normal and one abnormal score"
        )
    return np.asarray(normal), np.asarray(abnormal)


def roc(scores) -> RocCurve:
    """Build the ROC curve of labeled scores, with trapezoidal AUC and EER.

    `scores` is an iterable of LabeledScore or (score, label) pairs.
    """
    normal, abnormal = _split_scores(scores)
    n_neg, n_pos = normal.size, abnormal.size

    thresholds = np.unique(np.concatenate([normal, abnormal]))[::-1]
    points = [(0.0, 0.0)]
    point_thresholds = [np.inf]
    for t in thresholds:
        fpr = float(np.count_nonzero(normal >= t)) / n_neg
        tpr = float(np.count_nonzero(abnormal >= t)) / n_pos
        points.append((fpr, tpr))
        point_thresholds.append(float(t))

    fprs = np.array([p[0] for p in points])
    tprs = np.array([p[1] for p in points])
    auc = float(np.trapezoid(tprs, fprs))
    eer, eer_threshold = _equal_error_rate(fprs, tprs, point_thresholds)
    return RocCurve(
        points=tuple(points),
        thresholds=tuple(point_thresholds),
        auc=auc,
        eer=eer,
        eer_threshold=eer_threshold,
    )


def _equal_error_rate(fprs, tprs, thresholds) -> tuple[float, float]:
    """Interpolated EER along the ROC polyline and its nearest real threshold.

    g = fpr - (1 - tpr) is nondecreasing along the curve, from -1 at (0, 0)
    to +1 at (1, 1), so it has a sign change.  The EER is the fpr value where
    the interpolated segment crosses g = 0; the reported threshold is the one
    of the bracketing point with the smaller |g|, since only point thresholds
    are realizable decision rules.
    """
    g = fprs - (1.0 - tprs)
    idx = int(np.searchsorted(g > 0, True))  # first point with g > 0
    if idx == 0:
        return float(fprs[0]), float(thresholds[0])
    lo, hi = idx - 1, idx
    if g[hi] == g[lo]:
        s = 0.0
    else:
        s = -g[lo] / (g[hi] - g[lo])
    eer_fpr = fprs[lo] + s * (fprs[hi] - fprs[lo])
    eer_fnr = (1.0 - tprs[lo]) + s * ((1.0 - tprs[hi]) - (1.0 - tprs[lo]))
    eer = float(0.5 * (eer_fpr + eer_fnr))  # equal at the crossing; mean for rounding
    nearest = lo if abs(g[lo]) <= abs(g[hi]) else hi
    return eer, float(thresholds[nearest])


def confusion_counts(scores, threshold: float) -> tuple[int, int, int, int]:
    """(tp, fp, tn, fn) under the rule: score >= threshold means abnormal."""
    normal, abnormal = _split_scores(scores)
    tp = int(np.count_nonzero(abnormal >= threshold))
    fn = abnormal.size - tp
    fp = int(np.count_nonzero(normal >= threshold))
    tn = normal.size - fp
    return tp, fp, tn, fn


def report_at_eer(curve: RocCurve, scores) -> MetricReport:
    """Confusion metrics of the labeled scores at the curve's EER threshold."""
    tp, fp, tn, fn = confusion_counts(scores, curve.eer_threshold)
    return _report_from_counts(curve, tp, fp, tn, fn, curve.eer_threshold)


def _report_from_counts(curve, tp, fp, tn, fn, threshold) -> MetricReport:
    sensitivity = tp / (tp + fn) if (tp + fn) else 0.0
    specificity = tn / (tn + fp) if (tn + fp) else 0.0
    precision_undefined = (tp + fp) == 0
    precision = 0.0 if precision_undefined else tp / (tp + fp)
    total = tp + fp + tn + fn
    accuracy = (tp + tn) / total
    f1 = (
        2.0 * precision * sensitivity / (precision + sensitivity)
        if (precision + sensitivity) > 0
        else 0.0
    )
    return MetricReport(
        auc=curve.auc,
        eer=curve.eer,
        sensitivity=sensitivity,
        specificity=specificity,
        precision=precision,
        accuracy=accuracy,
        f1=f1,
        tp=tp,
        fp=fp,
        tn=tn,
        fn=fn,
        threshold=threshold,
        precision_undefined=precision_undefined,
    )


def evaluate(scores) -> tuple[RocCurve, MetricReport]:
    """ROC sweep plus EER-threshold confusion metrics in one call."""
    curve = roc(scores)
    return curve, report_at_eer(curve, scores)


def format_report_table(rows: dict[str, MetricReport]) -> str:
    """Aligned text table of reports, one labeled row each."""
    headers = ["Index estimation", "AUC", "EER", "Sens", "Spec", "Prec", "Acc", "F1"]
    label_width = max(len(headers[0]), *(len(k) for k in rows)) if rows else len(headers[0])
    lines = [
        f"{headers[0]:<{label_width}}  " + "  ".join(f"{h:>6}" for h in headers[1:])
    ]
    for label, r in rows.items():
        values = [r.auc, r.eer, r.sensitivity, r.specificity, r.precision, r.accuracy, r.f1]
        lines.append(
            f"{label:<{label_width}}  " + "  ".join(f"{v:6.3f}" for v in values)
        )
    return "\n".join(lines)
