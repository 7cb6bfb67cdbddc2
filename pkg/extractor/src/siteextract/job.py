"""Job manifest: what to embed, with which backend, written where.

A manifest is a single JSON object:

    {
      "backend": "stub",
      "dimension": 256,
      "frame_count": 8,
      "prompts": [{"label": "drilling", "prompt": "a construction worker drilling"}],
      "videos": [{"clip_id": "c1", "path": "a.mp4",
                  "timestamp": "2023-10-02T08:00:00+00:00", "ground_truth": "drilling"}],
      "class_output": "classes.txt",
      "clip_output": "clips.txt"
    }

"videos" and "ground_truth" are optional; a prompts-only job writes just the
class file. "model" selects the checkpoint for model-backed backends and is
ignored by the stub; "dimension" is only meaningful for the stub (a real
model's width is whatever the model says).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime

from .errors import JobValidationError, ManifestError

DEFAULT_FRAME_COUNT = 8
DEFAULT_PROMPT_TEMPLATE = "a construction worker {gerund}"


@dataclass(frozen=True)
class PromptSpec:
    label: str
    prompt: str


@dataclass(frozen=True)
class VideoSpec:
    clip_id: str
    path: str
    timestamp: str
    ground_truth: str | None = None


@dataclass(frozen=True)
class ExtractionJob:
    backend: str
    prompts: tuple[PromptSpec, ...]
    videos: tuple[VideoSpec, ...]
    class_output: str
    clip_output: str | None
    model: str | None = None
    dimension: int = 512
    frame_count: int = DEFAULT_FRAME_COUNT
    extras: dict = field(default_factory=dict)


def _check_timestamp(raw: str) -> str | None:
    """Return a diagnostic for an unusable capture timestamp, else None."""
    try:
        parsed = datetime.fromisoformat(raw.replace("Z", "+00:00"))
    except (ValueError, AttributeError):
        return f"timestamp {raw!r} is not ISO-8601"
    if parsed.tzinfo is None:
        return f"timestamp {raw!r} has no UTC offset"
    return None


def parse_job(document: str) -> ExtractionJob:
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"manifest is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ManifestError("manifest must be a JSON object")
    if not isinstance(data.get("prompts"), list):
        raise ManifestError("manifest needs a 'prompts' array")
    if "class_output" not in data:
        raise ManifestError("manifest needs a 'class_output' path")

    diagnostics: list[str] = []

    prompts: list[PromptSpec] = []
    seen_labels: set[str] = set()
    for pos, raw in enumerate(data["prompts"]):
        if not isinstance(raw, dict) or "label" not in raw or "prompt" not in raw:
            raise ManifestError(f"prompt #{pos} must be an object with label and prompt")
        label = str(raw["label"]).strip().lower()
        text = str(raw["prompt"]).strip()
        if not label:
            diagnostics.append(f"prompt #{pos} has an empty label")
        elif label in seen_labels:
            diagnostics.append(f"duplicate prompt label {label!r}")
        seen_labels.add(label)
        if not text:
            diagnostics.append(f"prompt for {label!r} is empty")
        prompts.append(PromptSpec(label=label, prompt=text))
    if not prompts:
        diagnostics.append("prompt list is empty")

    videos: list[VideoSpec] = []
    seen_clips: set[str] = set()
    for pos, raw in enumerate(data.get("videos") or []):
        if not isinstance(raw, dict):
            raise ManifestError(f"video #{pos} must be an object")
        missing = [k for k in ("clip_id", "path", "timestamp") if k not in raw]
        if missing:
            raise ManifestError(f"video #{pos} is missing {', '.join(missing)}")
        clip_id = str(raw["clip_id"]).strip()
        if not clip_id:
            diagnostics.append(f"video #{pos} has an empty clip_id")
        elif clip_id in seen_clips:
            diagnostics.append(f"duplicate clip_id {clip_id!r}")
        seen_clips.add(clip_id)
        problem = _check_timestamp(raw["timestamp"])
        if problem:
            diagnostics.append(f"video {clip_id!r}: {problem}")
        gt = raw.get("ground_truth")
        videos.append(
            VideoSpec(
                clip_id=clip_id,
                path=str(raw["path"]),
                timestamp=str(raw["timestamp"]),
                ground_truth=str(gt).strip().lower() if gt is not None else None,
            )
        )
    if videos and not data.get("clip_output"):
        diagnostics.append("manifest lists videos but no 'clip_output' path")

    frame_count = data.get("frame_count", DEFAULT_FRAME_COUNT)
    if not isinstance(frame_count, int) or frame_count < 1:
        diagnostics.append(f"frame_count must be a positive integer, got {frame_count!r}")

    dimension = data.get("dimension", 512)
    if not isinstance(dimension, int) or dimension < 2:
        diagnostics.append(f"dimension must be an integer >= 2, got {dimension!r}")

    if diagnostics:
        raise JobValidationError(diagnostics)

    return ExtractionJob(
        backend=str(data.get("backend", "stub")),
        prompts=tuple(prompts),
        videos=tuple(videos),
        class_output=str(data["class_output"]),
        clip_output=str(data["clip_output"]) if data.get("clip_output") else None,
        model=str(data["model"]) if data.get("model") else None,
        dimension=dimension,
        frame_count=frame_count,
    )
