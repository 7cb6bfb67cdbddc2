"""Prediction record serialization.

Prediction runs are stored line-oriented: one JSON object per line, keys
sorted, no timestamps unless explicitly stamped, so identical inputs
produce byte-identical files. An optional stamp line carries run
metadata under the "_meta" key and is skipped on read.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import FormatError
from .scoring import Prediction

_REQUIRED = ("clip_id", "predicted_label", "confidence")


def canonical_json(obj) -> str:
    """Serialize with sorted keys and stable separators."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def prediction_to_record(pred: Prediction, ground_truth: str | None, fallback: str) -> dict:
    record = {
        "clip_id": pred.clip_id,
        "predicted_label": pred.predicted_label,
        "confidence": pred.confidence,
        "ground_truth": ground_truth,
        "label_space": pred.label_space.as_dict(),
        "restricted_space": (
            None if pred.restricted_space is None else pred.restricted_space.as_dict()
        ),
        "distribution": [float(v) for v in pred.distribution],
        "config": pred.config.as_dict(),
        "fallback": fallback,
    }
    return record


@dataclass(eq=False)
class PredictionRecord:
    """One scored clip, as read back from a prediction file."""

    clip_id: str
    predicted_label: str
    confidence: float
    ground_truth: str | None = None
    label_space: dict | None = None
    restricted_space: dict | None = None
    distribution: list[float] | None = None
    config: dict | None = None
    extras: dict = field(default_factory=dict)


def parse_prediction_lines(text: str, source: str = "predictions") -> list[PredictionRecord]:
    """Parse a prediction file; meta lines are skipped, ids must be unique."""
    records: list[PredictionRecord] = []
    seen: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            raise FormatError(f"{source}:{lineno}: blank line in prediction file")
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{source}:{lineno}: not valid JSON: {exc}") from None
        if not isinstance(obj, dict):
            raise FormatError(f"{source}:{lineno}: expected a JSON object")
        if "_meta" in obj:
            continue
        missing = [k for k in _REQUIRED if k not in obj]
        if missing:
            raise FormatError(
                f"{source}:{lineno}: record is missing {', '.join(missing)}"
            )
        clip_id = obj["clip_id"]
        if not isinstance(clip_id, str) or not clip_id:
            raise FormatError(f"{source}:{lineno}: clip_id must be a non-empty string")
        if clip_id in seen:
            raise FormatError(f"{source}:{lineno}: duplicate clip id {clip_id!r}")
        seen.add(clip_id)
        confidence = obj["confidence"]
        if not isinstance(confidence, (int, float)) or isinstance(confidence, bool):
            raise FormatError(f"{source}:{lineno}: confidence must be a number")
        known = {
            "clip_id",
            "predicted_label",
            "confidence",
            "ground_truth",
            "label_space",
            "restricted_space",
            "distribution",
            "config",
        }
        records.append(
            PredictionRecord(
                clip_id=clip_id,
                predicted_label=obj["predicted_label"],
                confidence=float(confidence),
                ground_truth=obj.get("ground_truth"),
                label_space=obj.get("label_space"),
                restricted_space=obj.get("restricted_space"),
                distribution=obj.get("distribution"),
                config=obj.get("config"),
                extras={k: v for k, v in obj.items() if k not in known},
            )
        )
    return records


def truths_from_records(records) -> dict[str, str]:
    """clip_id -> ground truth; records without one are left out."""
    return {
        r.clip_id: r.ground_truth for r in records if r.ground_truth is not None
    }
