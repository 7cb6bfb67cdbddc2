from dataclasses import dataclass

import numpy as np
import pytest
import sklearn.metrics

from sitescope import (
    Averaging,
    ConfusionMatrix,
    ValidationError,
    build_confusion,
    compare_runs,
    compute_metrics,
    confidence_stats,
)
from sitescope.metrics import _summarize


@dataclass
class P:
    clip_id: str
    predicted_label: str
    confidence: float = 0.5


def preds_from(y_pred, confidences=None):
    confidences = confidences or [0.5] * len(y_pred)
    return [P(f"c{i}", lab, conf) for i, (lab, conf) in enumerate(zip(y_pred, confidences))]


def truths_from(y_true):
    return {f"c{i}": lab for i, lab in enumerate(y_true)}


def random_assignment(rng, k=None, n=None):
    k = k or int(rng.integers(2, 9))
    n = n or int(rng.integers(k, 60))
    labels = [f"L{j}" for j in range(k)]
    y_true = [labels[int(rng.integers(k))] for _ in range(n)]
    y_pred = [labels[int(rng.integers(k))] for _ in range(n)]
    return labels, y_true, y_pred


def test_build_confusion_counts_match_sklearn():
    rng = np.random.default_rng(17)
    for _ in range(20):
        labels, y_true, y_pred = random_assignment(rng)
        cm = build_confusion(preds_from(y_pred), truths_from(y_true), labels)
        expected = sklearn.metrics.confusion_matrix(y_true, y_pred, labels=labels)
        assert np.array_equal(cm.counts, expected)


def test_build_confusion_requires_truth_for_every_clip():
    with pytest.raises(ValidationError, match="'c1'"):
        build_confusion(preds_from(["a", "a"]), {"c0": "a"}, ["a"])


def test_build_confusion_rejects_labels_outside_universe():
    with pytest.raises(ValidationError, match="truth label 'b'"):
        build_confusion(preds_from(["a"]), {"c0": "b"}, ["a"])
    with pytest.raises(ValidationError, match="predicted 'z'"):
        build_confusion(preds_from(["z"]), {"c0": "a"}, ["a"])


def test_confusion_matrix_shape_and_negativity_checks():
    with pytest.raises(ValidationError, match="shape"):
        ConfusionMatrix(labels=("a", "b"), counts=np.zeros((2, 3)))
    with pytest.raises(ValidationError, match="negative"):
        ConfusionMatrix(labels=("a", "b"), counts=np.array([[1, 0], [0, -1]]))


def test_metrics_match_sklearn_across_averagings():
    rng = np.random.default_rng(23)
    for _ in range(60):
        labels, y_true, y_pred = random_assignment(rng)
        cm = build_confusion(preds_from(y_pred), truths_from(y_true), labels)
        report = compute_metrics(cm)
        assert report.accuracy == pytest.approx(
            sklearn.metrics.accuracy_score(y_true, y_pred), abs=1e-15
        )
        for scheme in ("weighted", "macro", "micro"):
            p, r, f, _ = sklearn.metrics.precision_recall_fscore_support(
                y_true, y_pred, labels=labels, average=scheme, zero_division=0
            )
            ours = report.averages[scheme]
            assert ours["precision"] == pytest.approx(p, abs=1e-12), scheme
            assert ours["recall"] == pytest.approx(r, abs=1e-12), scheme
            assert ours["f1"] == pytest.approx(f, abs=1e-12), scheme


def test_weighted_recall_equals_accuracy():
    rng = np.random.default_rng(29)
    for _ in range(100):
        labels, y_true, y_pred = random_assignment(rng)
        cm = build_confusion(preds_from(y_pred), truths_from(y_true), labels)
        report = compute_metrics(cm, Averaging.WEIGHTED)
        assert abs(report.recall - report.accuracy) <= 1e-12


def test_micro_metrics_equal_accuracy_exactly():
    rng = np.random.default_rng(31)
    for _ in range(50):
        labels, y_true, y_pred = random_assignment(rng)
        cm = build_confusion(preds_from(y_pred), truths_from(y_true), labels)
        report = compute_metrics(cm, Averaging.MICRO)
        micro = report.averages["micro"]
        assert micro["precision"] == report.accuracy
        assert micro["recall"] == report.accuracy
        assert micro["f1"] == report.accuracy


def test_zero_division_scores_zero_with_warnings():
    # 'b' never predicted, 'c' never true
    cm = build_confusion(
        preds_from(["a", "a", "c"]),
        {"c0": "a", "c1": "b", "c2": "b"},
        ["a", "b", "c"],
    )
    report = compute_metrics(cm)
    assert report.per_class["b"]["precision"] == 0.0
    assert report.per_class["c"]["recall"] == 0.0
    assert report.per_class["c"]["f1"] == 0.0
    assert any("'b' was never predicted" in w for w in report.warnings)
    assert any("'c' has no support" in w for w in report.warnings)
    assert np.isfinite(report.precision)


def test_headline_follows_averaging_choice():
    cm = build_confusion(
        preds_from(["a", "b", "a"]), {"c0": "a", "c1": "b", "c2": "b"}, ["a", "b"]
    )
    weighted = compute_metrics(cm, "weighted")
    macro = compute_metrics(cm, Averaging.MACRO)
    assert weighted.averages == macro.averages
    assert weighted.precision == weighted.averages["weighted"]["precision"]
    assert macro.precision == macro.averages["macro"]["precision"]


def test_empty_matrix_rejected():
    cm = ConfusionMatrix(labels=("a",), counts=np.zeros((1, 1), dtype=int))
    with pytest.raises(ValidationError, match="empty"):
        compute_metrics(cm)


def test_summary_stats_match_numpy_percentiles():
    rng = np.random.default_rng(37)
    values = rng.uniform(0, 1, 31)
    s = _summarize(values)
    assert s.count == 31
    assert s.mean == pytest.approx(np.mean(values), abs=0)
    assert s.q1 == pytest.approx(np.percentile(values, 25), abs=0)
    assert s.median == pytest.approx(np.percentile(values, 50), abs=0)
    assert s.q3 == pytest.approx(np.percentile(values, 75), abs=0)
    assert s.minimum == np.min(values)
    assert s.maximum == np.max(values)


def test_confidence_stats_splits_correct_subset():
    preds = preds_from(["a", "a", "b"], confidences=[0.9, 0.4, 0.7])
    truths = {"c0": "a", "c1": "b", "c2": "b"}
    stats = confidence_stats(preds, truths)
    assert stats.all.count == 3
    assert stats.correct.count == 2
    assert stats.correct.mean == pytest.approx((0.9 + 0.7) / 2, abs=1e-15)


def test_confidence_stats_correct_absent_when_nothing_correct():
    preds = preds_from(["a", "a"], confidences=[0.8, 0.6])
    truths = {"c0": "b", "c1": "b"}
    stats = confidence_stats(preds, truths)
    assert stats.correct is None
    assert stats.as_dict()["correct"] is None


def test_confidence_stats_validation():
    with pytest.raises(ValidationError, match="no predictions"):
        confidence_stats([], {})
    with pytest.raises(ValidationError, match="outside"):
        confidence_stats(preds_from(["a"], confidences=[1.2]), {"c0": "a"})
    with pytest.raises(ValidationError, match="ground truth"):
        confidence_stats(preds_from(["a"]), {})


def test_compare_runs_deltas():
    y_true = ["a", "a", "b", "b"]
    base = preds_from(["a", "b", "a", "a"], confidences=[0.5, 0.5, 0.5, 0.5])
    rest = preds_from(["a", "a", "b", "a"], confidences=[0.7, 0.6, 0.9, 0.8])
    report = compare_runs(base, rest, truths_from(y_true))
    assert report.baseline.metrics.accuracy == 0.25
    assert report.restricted.metrics.accuracy == 0.75
    assert report.deltas["accuracy"] == pytest.approx(0.5, abs=1e-15)
    per_clip = report.deltas["per_clip_confidence"]
    assert list(per_clip) == ["c0", "c1", "c2", "c3"]
    assert per_clip["c2"] == pytest.approx(0.4, abs=1e-15)
    assert report.deltas["confidence_mean_all"] == pytest.approx(0.25, abs=1e-15)


def test_compare_runs_requires_identical_clip_sets():
    base = preds_from(["a", "a"])
    rest = [P("c0", "a"), P("c9", "a")]
    with pytest.raises(ValidationError, match="c9"):
        compare_runs(base, rest, {"c0": "a", "c1": "a", "c9": "a"})


def test_compare_runs_correct_mean_delta_none_when_one_side_empty():
    base = preds_from(["b", "b"])   # nothing correct
    rest = preds_from(["a", "a"])   # all correct
    report = compare_runs(base, rest, {"c0": "a", "c1": "a"})
    assert report.deltas["confidence_mean_correct"] is None
    assert report.baseline.confidence.correct is None
    assert report.restricted.confidence.correct is not None
