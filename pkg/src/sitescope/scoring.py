"""Similarity scoring, label-space restriction, and prediction.

Logits are cosine similarities divided by a temperature tau; a numerically
stable softmax turns them into a distribution over a label space. Hard
restriction removes out-of-task classes before the softmax, so the
renormalized distribution still sums to one over the survivors. Soft
restriction subtracts a penalty lambda from out-of-task logits instead,
which interpolates between no restriction (lambda 0) and hard restriction
(lambda -> infinity). Everything here is a pure function of its inputs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .embeddings import ClassEmbeddingTable, ClipRecord, as_embedding, normalize
from .errors import ValidationError
from .registry import LabelRegistry, LabelSpace
from .schedule import FallbackPolicy, Schedule, resolve_label_space

# Ties in the argmax are broken toward the lowest registry index, which is
# the first position in any canonically ordered label space.
TIE_BREAK_RULE = "lowest-registry-index"


class RestrictionMode(enum.Enum):
    OFF = "off"
    HARD = "hard"
    SOFT = "soft"


@dataclass(frozen=True)
class ScoringConfig:
    """Temperature, restriction mode, and soft-mode penalty.

    tau defaults to 0.01, the usual logit scale for contrastive
    vision-language models; it is recorded in every Prediction so runs
    stay comparable.
    """

    tau: float = 0.01
    mode: RestrictionMode = RestrictionMode.OFF
    penalty_lambda: float = 0.0

    def __post_init__(self):
        if isinstance(self.mode, str):
            object.__setattr__(self, "mode", RestrictionMode(self.mode))
        if not (math.isfinite(self.tau) and self.tau > 0):
            raise ValidationError(f"tau must be a positive real, got {self.tau!r}")
        if not (math.isfinite(self.penalty_lambda) and self.penalty_lambda >= 0):
            raise ValidationError(
                f"penalty_lambda must be nonnegative, got {self.penalty_lambda!r}"
            )

    def as_dict(self) -> dict:
        return {
            "tau": self.tau,
            "mode": self.mode.value,
            "penalty_lambda": self.penalty_lambda,
            "tie_break": TIE_BREAK_RULE,
        }


@dataclass(eq=False)
class LogitVector:
    """Per-label scores aligned to a label space's canonical order."""

    values: np.ndarray
    label_space: LabelSpace

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (len(self.label_space),):
            raise ValidationError(
                f"logit vector has {self.values.size} entries for a "
                f"{len(self.label_space)}-label space"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValidationError("logit vector contains a non-finite value")


@dataclass(eq=False)
class Prediction:
    """Per-clip outcome: distribution, argmax label, and provenance.

    ``distribution`` aligns to ``label_space``; ``restricted_space`` is
    the schedule-resolved space that drove the restriction (None when the
    run had restriction off).
    """

    clip_id: str
    predicted_label: str
    confidence: float
    distribution: np.ndarray
    label_space: LabelSpace
    restricted_space: LabelSpace | None
    config: ScoringConfig


def cosine_similarity(a, b) -> float:
    """Cosine of the angle between two vectors, clamped to [-1, 1].

    The clamp guards against rounding pushing a dot product of unit
    vectors just past the mathematical bounds.
    """
    a = as_embedding(a, where="first vector")
    b = as_embedding(b, where="second vector")
    if a.size != b.size:
        raise ValidationError(
            f"dimension mismatch: {a.size} vs {b.size}"
        )
    value = float(np.dot(normalize(a), normalize(b)))
    return min(1.0, max(-1.0, value))


def compute_logits(clip_embedding, table: ClassEmbeddingTable, space: LabelSpace, tau: float) -> LogitVector:
    """Temperature-scaled similarities between a clip and each class in a space."""
    if not (math.isfinite(tau) and tau > 0):
        raise ValidationError(f"tau must be a positive real, got {tau!r}")
    if len(space) == 0:
        raise ValidationError("cannot compute logits over an empty label space")
    clip = as_embedding(clip_embedding, where="clip embedding")
    sims = np.empty(len(space), dtype=np.float64)
    for i, label_id in enumerate(space.label_ids):
        sims[i] = cosine_similarity(clip, table.vector(label_id))
    return LogitVector(values=sims / tau, label_space=space)


def softmax(logits) -> np.ndarray:
    """Stable softmax: exponentials are taken after subtracting the max
    logit, so arbitrarily large magnitudes cannot overflow."""
    values = logits.values if isinstance(logits, LogitVector) else np.asarray(logits, dtype=np.float64)
    if values.size == 0:
        raise ValidationError("cannot take a softmax of an empty vector")
    if not np.all(np.isfinite(values)):
        raise ValidationError("softmax input contains a non-finite value")
    shifted = values - np.max(values)
    exps = np.exp(shifted)
    return exps / np.sum(exps)


def _require_subset(restricted: LabelSpace, full: LabelSpace):
    extra = [lid for lid in restricted.label_ids if lid not in full.label_ids]
    if extra:
        raise ValidationError(
            f"restricted space is not a subset of the full space; extra labels: {', '.join(extra)}"
        )


def restrict_hard(
    clip_embedding,
    table: ClassEmbeddingTable,
    full_space: LabelSpace,
    restricted_space: LabelSpace,
    tau: float,
) -> LogitVector:
    """Logits over the surviving classes only.

    Removal happens before the softmax, so the downstream distribution is
    renormalized over the survivors; stored logits stay finite rather
    than carrying -inf sentinels.
    """
    if len(restricted_space) == 0:
        raise ValidationError("hard restriction to an empty label space")
    _require_subset(restricted_space, full_space)
    return compute_logits(clip_embedding, table, restricted_space, tau)


def restrict_soft(logits: LogitVector, restricted_space: LabelSpace, penalty_lambda: float) -> LogitVector:
    """Subtract a penalty from every logit outside the restricted space.

    Equivalent to multiplying the unnormalized probability of an
    out-of-task class by exp(-lambda): lambda 0 leaves the distribution
    untouched, lambda -> infinity converges to hard restriction.
    """
    if not (math.isfinite(penalty_lambda) and penalty_lambda >= 0):
        raise ValidationError(f"penalty_lambda must be nonnegative, got {penalty_lambda!r}")
    _require_subset(restricted_space, logits.label_space)
    keep = np.array([lid in restricted_space for lid in logits.label_space.label_ids])
    values = logits.values - np.where(keep, 0.0, penalty_lambda)
    return LogitVector(values=values, label_space=logits.label_space)


def predict_clip(
    clip: ClipRecord,
    table: ClassEmbeddingTable,
    schedule: Schedule | None,
    registry: LabelRegistry,
    config: ScoringConfig,
    fallback: FallbackPolicy = FallbackPolicy.FULL_SPACE,
) -> Prediction:
    """Score one clip end to end: resolve the label space at the clip's
    capture time, compute logits per the restriction mode, softmax, argmax.
    """
    full = registry.full_space()
    restricted = None
    if config.mode is not RestrictionMode.OFF:
        if schedule is None:
            raise ValidationError(
                f"clip {clip.clip_id!r}: a schedule is required when restriction mode "
                f"is {config.mode.value!r}"
            )
        restricted = resolve_label_space(schedule, registry, clip.timestamp, fallback)
        if len(restricted) == 0:
            raise ValidationError(
                f"clip {clip.clip_id!r}: resolved label space is empty under the "
                f"'empty' fallback policy"
            )

    if config.mode is RestrictionMode.HARD:
        logits = restrict_hard(clip.embedding, table, full, restricted, config.tau)
    elif config.mode is RestrictionMode.SOFT:
        logits = restrict_soft(
            compute_logits(clip.embedding, table, full, config.tau),
            restricted,
            config.penalty_lambda,
        )
    else:
        logits = compute_logits(clip.embedding, table, full, config.tau)

    probs = softmax(logits)
    idx = int(np.argmax(probs))
    space = logits.label_space
    return Prediction(
        clip_id=clip.clip_id,
        predicted_label=space.label_ids[idx],
        confidence=float(probs[idx]),
        distribution=probs,
        label_space=space,
        restricted_space=restricted,
        config=config,
    )


def info_nce(pairs, tau: float) -> float:
    """Contrastive diagnostic loss over matched embedding pairs.

    For each pair (x_i, y_i) the positive similarity competes against
    x_i's similarity to every y_j in the batch:

        loss = -(1/N) sum_i log[ exp(sim(x_i, y_i)/tau)
                                 / sum_j exp(sim(x_i, y_j)/tau) ]

    Evaluated exactly as written, never optimized. Always >= 0, and 0
    exactly when each row's diagonal carries the entire row mass (any
    single-pair batch included).
    """
    if not (math.isfinite(tau) and tau > 0):
        raise ValidationError(f"tau must be a positive real, got {tau!r}")
    pairs = list(pairs)
    if not pairs:
        raise ValidationError("info_nce requires at least one pair")
    xs = [normalize(x, where=f"pair[{i}] x") for i, (x, _) in enumerate(pairs)]
    ys = [normalize(y, where=f"pair[{i}] y") for i, (_, y) in enumerate(pairs)]
    dim = xs[0].size
    for i, (x, y) in enumerate(zip(xs, ys)):
        if x.size != dim or y.size != dim:
            raise ValidationError(f"pair[{i}] dimension mismatch")
    sim = np.clip(np.stack(xs) @ np.stack(ys).T, -1.0, 1.0) / tau
    # row-wise logsumexp with max subtraction; row i's positive is sim[i, i]
    row_max = np.max(sim, axis=1, keepdims=True)
    lse = np.log(np.sum(np.exp(sim - row_max), axis=1)) + row_max[:, 0]
    losses = lse - np.diagonal(sim)
    return float(np.mean(losses))
