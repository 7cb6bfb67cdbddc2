"""Confusion-matrix metrics and confidence statistics.

Accuracy, per-class precision/recall/F1, and macro/micro/weighted
averages, plus summary statistics of prediction confidence over all
predictions and over the correct subset. Weighted averaging is the
default headline scheme because weighted recall coincides with accuracy
in single-label multiclass evaluation; macro and micro are always
computed alongside it.

Zero-division cases (a class never predicted, a class with no support)
score 0 and leave an explicit warning record; no NaN is ever emitted.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError


class Averaging(enum.Enum):
    WEIGHTED = "weighted"
    MACRO = "macro"
    MICRO = "micro"


@dataclass(eq=False)
class ConfusionMatrix:
    """Square count matrix, rows true classes, columns predicted classes."""

    labels: tuple[str, ...]
    counts: np.ndarray

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        k = len(self.labels)
        if self.counts.shape != (k, k):
            raise ValidationError(
                f"confusion matrix shape {self.counts.shape} does not match {k} labels"
            )
        if np.any(self.counts < 0):
            raise ValidationError("confusion matrix contains a negative count")

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def trace(self) -> int:
        return int(np.trace(self.counts))

    def support(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    def predicted_totals(self) -> np.ndarray:
        return self.counts.sum(axis=0)


def build_confusion(predictions, truths, labels) -> ConfusionMatrix:
    """Accumulate counts[true][predicted] over predictions.

    ``truths`` maps clip_id to the true label; every prediction must have
    a truth and both labels must exist in ``labels`` (the canonical
    order, normally the registry's).
    """
    labels = tuple(labels)
    index = {lab: i for i, lab in enumerate(labels)}
    counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for pred in predictions:
        clip_id = pred.clip_id
        if clip_id not in truths:
            raise ValidationError(f"no ground truth for clip {clip_id!r}")
        truth = truths[clip_id]
        if truth not in index:
            raise ValidationError(
                f"clip {clip_id!r} has truth label {truth!r} outside the label universe"
            )
        if pred.predicted_label not in index:
            raise ValidationError(
                f"clip {clip_id!r} predicted {pred.predicted_label!r} outside the label universe"
            )
        counts[index[truth], index[pred.predicted_label]] += 1
    return ConfusionMatrix(labels=labels, counts=counts)


@dataclass(eq=False)
class MetricsReport:
    count: int
    accuracy: float
    averaging: str
    averages: dict
    per_class: dict
    warnings: list = field(default_factory=list)

    @property
    def precision(self) -> float:
        return self.averages[self.averaging]["precision"]

    @property
    def recall(self) -> float:
        return self.averages[self.averaging]["recall"]

    @property
    def f1(self) -> float:
        return self.averages[self.averaging]["f1"]

    def as_dict(self) -> dict:
        return {
            "count": self.count,
            "accuracy": self.accuracy,
            "averaging": self.averaging,
            "averages": self.averages,
            "per_class": self.per_class,
            "warnings": list(self.warnings),
        }


def compute_metrics(cm: ConfusionMatrix, averaging: Averaging = Averaging.WEIGHTED) -> MetricsReport:
    """Metrics from a confusion matrix.

    accuracy = trace / total; per-class precision TP/(TP+FP) and recall
    TP/(TP+FN) with the zero-division convention above; macro averages
    classes equally, weighted averages by support, micro works from the
    global TP/FP/FN counts. In single-label multiclass the global FP and
    FN totals are both (total - trace), so micro precision, recall, and
    F1 all equal accuracy exactly.
    """
    if isinstance(averaging, str):
        averaging = Averaging(averaging)
    total = cm.total
    if total < 1:
        raise ValidationError("cannot compute metrics for an empty confusion matrix")

    warnings: list[str] = []
    support = cm.support()
    predicted = cm.predicted_totals()
    tp = np.diagonal(cm.counts)

    per_class: dict[str, dict] = {}
    precisions = np.zeros(len(cm.labels))
    recalls = np.zeros(len(cm.labels))
    f1s = np.zeros(len(cm.labels))
    for i, label in enumerate(cm.labels):
        if predicted[i] > 0:
            p = tp[i] / predicted[i]
        else:
            p = 0.0
            warnings.append(f"class {label!r} was never predicted; precision set to 0")
        if support[i] > 0:
            r = tp[i] / support[i]
        else:
            r = 0.0
            warnings.append(f"class {label!r} has no support; recall set to 0")
        f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
        precisions[i], recalls[i], f1s[i] = p, r, f1
        per_class[label] = {
            "precision": float(p),
            "recall": float(r),
            "f1": float(f1),
            "support": int(support[i]),
            "predicted": int(predicted[i]),
        }

    accuracy = cm.trace / total
    weights = support / total
    micro = cm.trace / total  # global TP/(TP+FP): FP total == FN total == total - trace
    averages = {
        "macro": {
            "precision": float(np.mean(precisions)),
            "recall": float(np.mean(recalls)),
            "f1": float(np.mean(f1s)),
        },
        "micro": {"precision": micro, "recall": micro, "f1": micro},
        "weighted": {
            "precision": float(np.dot(weights, precisions)),
            "recall": float(np.dot(weights, recalls)),
            "f1": float(np.dot(weights, f1s)),
        },
    }
    return MetricsReport(
        count=total,
        accuracy=accuracy,
        averaging=averaging.value,
        averages=averages,
        per_class=per_class,
        warnings=warnings,
    )


@dataclass(frozen=True)
class SummaryStats:
    count: int
    mean: float
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float

    def as_dict(self) -> dict:
        return {
            "count": self.count,
            "mean": self.mean,
            "min": self.minimum,
            "q1": self.q1,
            "median": self.median,
            "q3": self.q3,
            "max": self.maximum,
        }


def _summarize(values) -> SummaryStats:
    arr = np.asarray(values, dtype=np.float64)
    q1, median, q3 = np.percentile(arr, [25, 50, 75])
    return SummaryStats(
        count=int(arr.size),
        mean=float(np.mean(arr)),
        minimum=float(np.min(arr)),
        q1=float(q1),
        median=float(median),
        q3=float(q3),
        maximum=float(np.max(arr)),
    )


@dataclass(eq=False)
class ConfidenceStats:
    """Confidence summaries over all predictions and the correct subset.

    ``correct`` is None when nothing was predicted correctly; absence is
    reported rather than a fabricated zero.
    """

    all: SummaryStats
    correct: SummaryStats | None

    def as_dict(self) -> dict:
        return {
            "all": self.all.as_dict(),
            "correct": self.correct.as_dict() if self.correct is not None else None,
        }


def confidence_stats(predictions, truths) -> ConfidenceStats:
    predictions = list(predictions)
    if not predictions:
        raise ValidationError("cannot compute confidence statistics with no predictions")
    confidences = []
    correct_confidences = []
    for pred in predictions:
        c = float(pred.confidence)
        if not 0.0 <= c <= 1.0:
            raise ValidationError(
                f"clip {pred.clip_id!r} has confidence {c!r} outside [0, 1]"
            )
        confidences.append(c)
        if pred.clip_id not in truths:
            raise ValidationError(f"no ground truth for clip {pred.clip_id!r}")
        if pred.predicted_label == truths[pred.clip_id]:
            correct_confidences.append(c)
    return ConfidenceStats(
        all=_summarize(confidences),
        correct=_summarize(correct_confidences) if correct_confidences else None,
    )


@dataclass(eq=False)
class RunReport:
    metrics: MetricsReport
    confidence: ConfidenceStats

    def as_dict(self) -> dict:
        return {"metrics": self.metrics.as_dict(), "confidence": self.confidence.as_dict()}


@dataclass(eq=False)
class ComparisonReport:
    baseline: RunReport
    restricted: RunReport
    deltas: dict

    def as_dict(self) -> dict:
        return {
            "baseline": self.baseline.as_dict(),
            "restricted": self.restricted.as_dict(),
            "deltas": self.deltas,
        }


def compare_runs(
    baseline,
    restricted,
    truths,
    labels=None,
    averaging: Averaging = Averaging.WEIGHTED,
) -> ComparisonReport:
    """Pair a baseline (unrestricted) run against a restricted run.

    Both runs must cover exactly the same clips; deltas are
    restricted minus baseline.
    """
    baseline = list(baseline)
    restricted = list(restricted)
    base_ids = {p.clip_id for p in baseline}
    rest_ids = {p.clip_id for p in restricted}
    if base_ids != rest_ids:
        only_base = sorted(base_ids - rest_ids)
        only_rest = sorted(rest_ids - base_ids)
        raise ValidationError(
            "runs cover different clips; "
            f"only in baseline: {only_base}; only in restricted: {only_rest}"
        )
    if labels is None:
        labels = sorted(
            {truths[cid] for cid in base_ids}
            | {p.predicted_label for p in baseline}
            | {p.predicted_label for p in restricted}
        )

    def run_report(preds) -> RunReport:
        cm = build_confusion(preds, truths, labels)
        return RunReport(
            metrics=compute_metrics(cm, averaging),
            confidence=confidence_stats(preds, truths),
        )

    base_report = run_report(baseline)
    rest_report = run_report(restricted)

    averages_delta = {
        scheme: {
            m: rest_report.metrics.averages[scheme][m] - base_report.metrics.averages[scheme][m]
            for m in ("precision", "recall", "f1")
        }
        for scheme in ("macro", "micro", "weighted")
    }
    base_conf = {p.clip_id: float(p.confidence) for p in baseline}
    per_clip = {
        p.clip_id: float(p.confidence) - base_conf[p.clip_id]
        for p in sorted(restricted, key=lambda p: p.clip_id)
    }
    correct_delta = None
    if base_report.confidence.correct is not None and rest_report.confidence.correct is not None:
        correct_delta = rest_report.confidence.correct.mean - base_report.confidence.correct.mean
    deltas = {
        "accuracy": rest_report.metrics.accuracy - base_report.metrics.accuracy,
        "averages": averages_delta,
        "confidence_mean_all": rest_report.confidence.all.mean - base_report.confidence.all.mean,
        "confidence_mean_correct": correct_delta,
        "per_clip_confidence": per_clip,
    }
    return ComparisonReport(baseline=base_report, restricted=rest_report, deltas=deltas)
