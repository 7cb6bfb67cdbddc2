"""Scikit-learn style estimator wrapping the scoring pipeline.

ScheduleScopedClassifier is a zero-shot classifier: there is nothing to
train, so fit() validates the wiring (registry, class-embedding table,
schedule) and freezes the configuration. predict/predict_proba then
compose with the wider sklearn ecosystem; probabilities are reported over
the full registry label order with exact zeros for classes a hard
restriction removed.
"""

from __future__ import annotations

from datetime import datetime, timezone

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .embeddings import ClipRecord
from .errors import ValidationError
from .registry import LabelRegistry
from .schedule import FallbackPolicy, Schedule, parse_timestamp
from .scoring import Prediction, RestrictionMode, ScoringConfig, predict_clip

# placeholder capture time for samples scored with restriction off; the
# schedule is never consulted in that mode
_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


class ScheduleScopedClassifier(BaseEstimator, ClassifierMixin):
    """Zero-shot activity classifier with schedule-scoped label spaces.

    Parameters
    ----------
    registry : LabelRegistry
        Label universe and task definitions; fixes the class order.
    class_table : ClassEmbeddingTable
        Unit-norm class-prompt embeddings, one per registry label.
    schedule : Schedule, optional
        Task time windows; required for the hard and soft modes.
    mode : {"off", "hard", "soft"}
        Label-space restriction mode.
    tau : float
        Softmax temperature applied to cosine similarities.
    penalty_lambda : float
        Logit penalty for out-of-task classes (soft mode only).
    fallback : {"full", "error", "empty"}
        What to resolve when no scheduled task covers a timestamp.
    """

    def __init__(
        self,
        registry: LabelRegistry = None,
        class_table=None,
        schedule: Schedule = None,
        mode: str = "off",
        tau: float = 0.01,
        penalty_lambda: float = 0.0,
        fallback: str = "full",
    ):
        self.registry = registry
        self.class_table = class_table
        self.schedule = schedule
        self.mode = mode
        self.tau = tau
        self.penalty_lambda = penalty_lambda
        self.fallback = fallback

    def fit(self, X=None, y=None):
        """Validate the wiring; no parameters are learned.

        Checks that every registry label has a class embedding, that the
        configuration is well formed, and that every scheduled task
        exists in the registry. Returns self.
        """
        if self.registry is None:
            raise ValidationError("a LabelRegistry is required")
        if self.class_table is None:
            raise ValidationError("a ClassEmbeddingTable is required")
        missing = [lid for lid in self.registry.label_ids if lid not in self.class_table]
        if missing:
            raise ValidationError(
                [f"no class embedding for label {lid!r}" for lid in missing]
            )
        self.config_ = ScoringConfig(
            tau=self.tau, mode=self.mode, penalty_lambda=self.penalty_lambda
        )
        self.fallback_ = (
            self.fallback
            if isinstance(self.fallback, FallbackPolicy)
            else FallbackPolicy(self.fallback)
        )
        if self.config_.mode is not RestrictionMode.OFF:
            if self.schedule is None:
                raise ValidationError(
                    f"a schedule is required when mode is {self.config_.mode.value!r}"
                )
            dangling = sorted(
                {e.task_id for e in self.schedule.entries if not self.registry.has_task(e.task_id)}
            )
            if dangling:
                raise ValidationError(
                    [f"scheduled task {tid!r} does not exist in the registry" for tid in dangling]
                )
        self.classes_ = np.asarray(self.registry.label_ids, dtype=object)
        self.n_features_in_ = self.class_table.dimension
        return self

    def _validate_X(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2:
            raise ValidationError(
                f"X must be a 2-D array of shape (n_samples, {self.n_features_in_})"
            )
        if X.shape[1] != self.n_features_in_:
            raise ValidationError(
                f"X has {X.shape[1]} features, class embeddings have {self.n_features_in_}"
            )
        if not np.all(np.isfinite(X)):
            raise ValidationError("X contains a non-finite value")
        return X

    def _validate_timestamps(self, timestamps, n: int):
        if timestamps is None:
            if self.config_.mode is RestrictionMode.OFF:
                return [_EPOCH] * n
            raise ValidationError(
                f"timestamps are required when mode is {self.config_.mode.value!r}"
            )
        stamps = [
            t if isinstance(t, datetime) else parse_timestamp(t) for t in timestamps
        ]
        if len(stamps) != n:
            raise ValidationError(
                f"got {len(stamps)} timestamps for {n} samples"
            )
        for t in stamps:
            if t.tzinfo is None:
                raise ValidationError("timestamps must carry an explicit UTC offset")
        return stamps

    def _score_rows(self, X, timestamps) -> list[Prediction]:
        check_is_fitted(self)
        X = self._validate_X(X)
        stamps = self._validate_timestamps(timestamps, X.shape[0])
        clips = [
            ClipRecord(clip_id=str(i), timestamp=t, embedding=row)
            for i, (row, t) in enumerate(zip(X, stamps))
        ]
        return self.predict_records(clips)

    def predict_records(self, clips) -> list[Prediction]:
        """Score ClipRecords; richer output than the array API."""
        check_is_fitted(self)
        return [
            predict_clip(
                clip,
                self.class_table,
                self.schedule,
                self.registry,
                self.config_,
                self.fallback_,
            )
            for clip in clips
        ]

    def predict(self, X, timestamps=None) -> np.ndarray:
        """Predicted label id per row of X."""
        preds = self._score_rows(X, timestamps)
        return np.asarray([p.predicted_label for p in preds], dtype=object)

    def predict_proba(self, X, timestamps=None) -> np.ndarray:
        """Probabilities over the full registry order (classes_).

        Rows sum to 1; classes removed by a hard restriction get exact
        zeros because they never entered the renormalized softmax.
        """
        preds = self._score_rows(X, timestamps)
        out = np.zeros((len(preds), len(self.classes_)), dtype=np.float64)
        col = {lab: j for j, lab in enumerate(self.classes_)}
        for i, p in enumerate(preds):
            for lab, prob in zip(p.label_space.label_ids, p.distribution):
                out[i, col[lab]] = prob
        return out
