"""Schedule-scoped zero-shot activity classification for site video.

Clip and class-prompt embeddings are compared by cosine similarity,
scaled by a temperature, and softmaxed into a distribution over a label
space. A work schedule restricts that space to the activities of the
tasks active at the clip's capture time, either by removing the other
classes outright (hard) or by penalizing their logits (soft).
"""

from .classifier import ScheduleScopedClassifier
from .embeddings import (
    ClassEmbeddingTable,
    ClipRecord,
    mean_pool,
    normalize,
    read_clip_set,
    read_embedding_table,
    read_pair_set,
    write_clip_set,
    write_embedding_table,
    write_pair_set,
)
from .errors import FormatError, SiteScopeError, ValidationError
from .metrics import (
    Averaging,
    ComparisonReport,
    ConfidenceStats,
    ConfusionMatrix,
    MetricsReport,
    RunReport,
    SummaryStats,
    build_confusion,
    compare_runs,
    compute_metrics,
    confidence_stats,
)
from .registry import (
    ActivityLabel,
    LabelRegistry,
    LabelSpace,
    Provenance,
    TaskDefinition,
    label_space_for_task,
    load_registry,
    union_label_spaces,
)
from .schedule import (
    FallbackPolicy,
    Schedule,
    ScheduleEntry,
    active_tasks_at,
    format_timestamp,
    parse_schedule,
    parse_timestamp,
    resolve_label_space,
)
from .scoring import (
    Prediction,
    RestrictionMode,
    ScoringConfig,
    compute_logits,
    cosine_similarity,
    info_nce,
    predict_clip,
    restrict_hard,
    restrict_soft,
    softmax,
)

__version__ = "0.1.0"

__all__ = [
    "ActivityLabel",
    "Averaging",
    "ClassEmbeddingTable",
    "ClipRecord",
    "ComparisonReport",
    "ConfidenceStats",
    "ConfusionMatrix",
    "FallbackPolicy",
    "FormatError",
    "LabelRegistry",
    "LabelSpace",
    "MetricsReport",
    "Prediction",
    "Provenance",
    "RestrictionMode",
    "RunReport",
    "Schedule",
    "ScheduleEntry",
    "ScheduleScopedClassifier",
    "ScoringConfig",
    "SiteScopeError",
    "SummaryStats",
    "TaskDefinition",
    "ValidationError",
    "active_tasks_at",
    "build_confusion",
    "compare_runs",
    "compute_logits",
    "compute_metrics",
    "confidence_stats",
    "cosine_similarity",
    "format_timestamp",
    "info_nce",
    "label_space_for_task",
    "load_registry",
    "mean_pool",
    "normalize",
    "parse_schedule",
    "parse_timestamp",
    "predict_clip",
    "read_clip_set",
    "read_embedding_table",
    "read_pair_set",
    "resolve_label_space",
    "restrict_hard",
    "restrict_soft",
    "softmax",
    "union_label_spaces",
    "write_clip_set",
    "write_embedding_table",
    "write_pair_set",
]
