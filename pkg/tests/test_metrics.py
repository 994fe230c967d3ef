"""ROC / AUC / EER tests.

The AUC oracle is the exhaustive pairwise ranking probability: over all
(abnormal, normal) score pairs, count 1 for a correctly ordered pair and
1/2 for a tie, then divide by the number of pairs.  The trapezoidal area
under the threshold-swept curve must agree with it to float precision.
"""

import numpy as np
import pytest

from gaitindex.errors import SingleClassError
from gaitindex.metrics import (
    LabeledScore,
    confusion_counts,
    evaluate,
    format_report_table,
    report_at_eer,
    roc,
)


def pairwise_auc(normal, abnormal):
    """Rank-based AUC oracle, O(n*m) double loop, ties count one half."""
    wins = 0.0
    for a in abnormal:
        for n in normal:
            if a > n:
                wins += 1.0
            elif a == n:
                wins += 0.5
    return wins / (len(normal) * len(abnormal))


def labeled(normal, abnormal):
    return [LabeledScore(float(v), "normal") for v in normal] + [
        LabeledScore(float(v), "abnormal") for v in abnormal
    ]


def random_score_set(rng):
    n = int(rng.integers(2, 201))
    m = int(rng.integers(2, 201))
    normal = rng.normal(0.0, 1.0, size=n)
    abnormal = rng.normal(rng.uniform(-0.5, 1.5), 1.0, size=m)
    if rng.random() < 0.5:
        # quantize to force plenty of exact ties across the two classes
        normal = np.round(normal, 1)
        abnormal = np.round(abnormal, 1)
    return normal, abnormal


# ----------------------------------------------------------------------
# AUC


def test_trapezoid_auc_equals_the_pairwise_oracle(rng):
    for _ in range(30):
        normal, abnormal = random_score_set(rng)
        curve = roc(labeled(normal, abnormal))
        oracle = pairwise_auc(normal, abnormal)
        assert abs(curve.auc - oracle) <= 1e-9


def test_auc_hand_case():
    # pairs: 0.5 beats 0.3 only; 0.8 beats both -> 3 of 4
    curve = roc(labeled([0.3, 0.6], [0.5, 0.8]))
    np.testing.assert_allclose(curve.auc, 0.75, rtol=0, atol=1e-15)


def test_perfect_separation():
    curve, report = evaluate(labeled([0.1, 0.2, 0.3], [0.7, 0.8, 0.9]))
    assert curve.auc == 1.0
    assert curve.eer == 0.0
    assert report.sensitivity == 1.0
    assert report.specificity == 1.0
    assert report.precision == 1.0
    assert report.accuracy == 1.0
    assert report.f1 == 1.0
    assert (report.tp, report.fp, report.tn, report.fn) == (3, 0, 3, 0)


def test_fully_inverted_separation():
    curve = roc(labeled([0.7, 0.8, 0.9], [0.1, 0.2, 0.3]))
    assert curve.auc == 0.0
    assert curve.eer == 1.0


def test_all_identical_scores_score_half():
    curve, report = evaluate(labeled([0.4, 0.4], [0.4, 0.4, 0.4]))
    np.testing.assert_allclose(curve.auc, 0.5, atol=1e-15)
    np.testing.assert_allclose(curve.eer, 0.5, atol=1e-15)
    # the only achievable operating points are all-normal and all-abnormal;
    # the tie resolves to the all-normal rule, leaving precision undefined
    assert report.precision_undefined
    assert report.precision == 0.0
    assert report.f1 == 0.0


def test_monotone_transform_invariance(rng):
    normal = rng.normal(size=40)
    abnormal = rng.normal(0.8, 1.0, size=35)
    base = roc(labeled(normal, abnormal))
    for transform in (np.exp, lambda v: 3.0 * v + 1.0):
        mapped = roc(labeled(transform(normal), transform(abnormal)))
        assert mapped.points == base.points
        assert mapped.auc == base.auc
        assert mapped.eer == base.eer


def test_negating_tie_free_scores_flips_the_auc(rng):
    normal = rng.normal(size=50)
    abnormal = rng.normal(0.5, 1.0, size=45)
    a = roc(labeled(normal, abnormal)).auc
    b = roc(labeled(-normal, -abnormal)).auc
    np.testing.assert_allclose(a + b, 1.0, atol=1e-12)


def test_curve_invariants(rng):
    normal, abnormal = random_score_set(rng)
    curve = roc(labeled(normal, abnormal))
    fprs = np.array([p[0] for p in curve.points])
    tprs = np.array([p[1] for p in curve.points])
    assert curve.points[0] == (0.0, 0.0)
    assert curve.points[-1] == (1.0, 1.0)
    assert np.all(np.diff(fprs) >= 0)
    assert np.all(np.diff(tprs) >= 0)
    assert curve.thresholds[0] == np.inf
    assert list(curve.thresholds[1:]) == sorted(curve.thresholds[1:], reverse=True)
    # re-integrate the returned polyline by the explicit trapezoid formula
    area = float(np.sum((fprs[1:] - fprs[:-1]) * (tprs[1:] + tprs[:-1]) * 0.5))
    np.testing.assert_allclose(curve.auc, area, rtol=1e-13, atol=1e-15)


# ----------------------------------------------------------------------
# EER and confusion metrics


def test_eer_balances_the_two_error_rates(rng):
    normal = rng.normal(0.0, 1.0, size=500)
    abnormal = rng.normal(1.0, 1.0, size=500)
    curve, report = evaluate(labeled(normal, abnormal))
    # at the reported threshold the miss rates agree up to set discreteness
    assert abs(report.sensitivity - report.specificity) <= 0.02
    assert abs((1.0 - report.sensitivity) - curve.eer) <= 0.02
    assert 0.0 < curve.eer < 0.5


def test_confusion_and_report_hand_case():
    """Engineered so the EER threshold is 0.6, giving tp=3 fp=1 tn=3 fn=1
    and every confusion metric exactly 0.75."""
    scores = labeled([0.6, 0.3, 0.2, 0.1], [0.9, 0.8, 0.7, 0.4])
    assert confusion_counts(scores, 0.6) == (3, 1, 3, 1)

    curve, report = evaluate(scores)
    assert report.threshold == 0.6
    assert (report.tp, report.fp, report.tn, report.fn) == (3, 1, 3, 1)
    assert report.sensitivity == 0.75
    assert report.specificity == 0.75
    assert report.precision == 0.75
    assert report.accuracy == 0.75
    assert report.f1 == 0.75
    np.testing.assert_allclose(report.eer, 0.25, atol=1e-15)
    np.testing.assert_allclose(report.auc, 15.0 / 16.0, atol=1e-15)


def test_decision_rule_counts_threshold_ties_as_abnormal():
    scores = labeled([0.5], [0.5])
    tp, fp, tn, fn = confusion_counts(scores, 0.5)
    assert (tp, fp, tn, fn) == (1, 1, 0, 0)


def test_report_at_eer_uses_an_achievable_threshold(rng):
    normal = rng.uniform(size=30)
    abnormal = rng.uniform(0.2, 1.2, size=25)
    curve = roc(labeled(normal, abnormal))
    report = report_at_eer(curve, labeled(normal, abnormal))
    all_scores = set(np.concatenate([normal, abnormal]).tolist()) | {np.inf}
    assert report.threshold in all_scores


# ----------------------------------------------------------------------
# input handling


def test_single_class_refusal():
    with pytest.raises(SingleClassError):
        roc(labeled([0.1, 0.2], []))
    with pytest.raises(SingleClassError):
        roc(labeled([], [0.1, 0.2]))
    with pytest.raises(SingleClassError):
        roc([])


def test_plain_tuples_are_accepted():
    pairs = [(0.2, "normal"), (0.9, "abnormal"), (0.4, "normal"), (0.6, "abnormal")]
    assert roc(pairs).auc == roc(labeled([0.2, 0.4], [0.9, 0.6])).auc


def test_labeled_score_validation():
    with pytest.raises(ValueError):
        LabeledScore(0.5, "positive")
    with pytest.raises(ValueError):
        LabeledScore(np.nan, "normal")
    with pytest.raises(ValueError):
        roc([(np.inf, "normal"), (0.2, "abnormal")])


def test_report_serialization_and_table():
    scores = labeled([0.1, 0.2, 0.3], [0.7, 0.8, 0.9])
    _, report = evaluate(scores)
    payload = report.to_dict()
    assert payload["counts"] == {"tp": 3, "fp": 0, "tn": 3, "fn": 0}
    assert payload["auc"] == 1.0

    table = format_report_table({"Weighted (sequence)": report})
    lines = table.splitlines()
    assert lines[0].startswith("Index estimation")
    for column in ("AUC", "EER", "Sens", "Spec", "Prec", "Acc", "F1"):
        assert column in lines[0]
    assert lines[1].startswith("Weighted (sequence)")
    assert " 1.000" in lines[1]
