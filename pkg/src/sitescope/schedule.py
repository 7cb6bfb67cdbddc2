"""Schedule parsing and timestamp-to-label-space resolution.

Schedule entries are half-open time windows [start, end) on a single UTC
timeline. Overlapping windows are permitted; a timestamp covered by
several tasks resolves to the union of their label sets, which never
excludes a scheduled activity. Outside every window the FallbackPolicy
decides what happens; the default of ``full`` keeps the whole universe in
play rather than ruling anything out.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from datetime import datetime, timezone

from .errors import FormatError, ValidationError
from .registry import LabelRegistry, LabelSpace, Provenance, label_space_for_task, union_label_spaces


class FallbackPolicy(enum.Enum):
    """Behavior when no scheduled task covers a timestamp."""

    FULL_SPACE = "full"
    ERROR = "error"
    EMPTY = "empty"


@dataclass(frozen=True)
class ScheduleEntry:
    task_id: str
    start: datetime
    end: datetime


@dataclass(frozen=True)
class Schedule:
    entries: tuple[ScheduleEntry, ...]


def parse_timestamp(text: str) -> datetime:
    """Parse an ISO-8601 timestamp with an explicit UTC offset.

    Naive timestamps are rejected: schedules and clip metadata come from
    different tools, and implicit local time drifts silently.
    """
    raw = str(text).strip()
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(raw)
    except ValueError as exc:
        raise FormatError(f"invalid ISO-8601 timestamp {text!r}: {exc}") from exc
    if dt.tzinfo is None:
        raise ValidationError(f"timestamp {text!r} has no UTC offset")
    return dt.astimezone(timezone.utc)


def format_timestamp(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).isoformat()


def parse_schedule(document: str) -> Schedule:
    """Parse a schedule document (JSON text) into a validated Schedule.

    Entries are validated (start strictly before end) and sorted by
    (start, task id). All invariant violations are reported together.
    """
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise FormatError(f"schedule document is not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or not isinstance(data.get("entries"), list):
        raise FormatError("schedule document must be an object with an 'entries' array")

    diagnostics: list[str] = []
    entries: list[ScheduleEntry] = []
    for pos, raw in enumerate(data["entries"]):
        if not isinstance(raw, dict):
            raise FormatError(f"schedule entry #{pos} must be an object")
        missing = [k for k in ("task", "start", "end") if k not in raw]
        if missing:
            raise FormatError(f"schedule entry #{pos} is missing {', '.join(missing)}")
        task_id = str(raw["task"]).strip()
        if not task_id:
            diagnostics.append(f"schedule entry #{pos} has an empty task id")
            continue
        start = parse_timestamp(raw["start"])
        end = parse_timestamp(raw["end"])
        if start >= end:
            diagnostics.append(
                f"schedule entry for task {task_id!r} ends at or before it starts "
                f"({format_timestamp(start)} >= {format_timestamp(end)})"
            )
            continue
        entries.append(ScheduleEntry(task_id=task_id, start=start, end=end))

    if diagnostics:
        raise ValidationError(diagnostics)
    entries.sort(key=lambda e: (e.start, e.task_id))
    return Schedule(entries=tuple(entries))


def active_tasks_at(schedule: Schedule, t: datetime) -> list[str]:
    """Task ids whose [start, end) window contains t, sorted lexicographically."""
    if t.tzinfo is None:
        raise ValidationError("query timestamp has no UTC offset")
    active = {e.task_id for e in schedule.entries if e.start <= t < e.end}
    return sorted(active)


def resolve_label_space(
    schedule: Schedule,
    registry: LabelRegistry,
    t: datetime,
    fallback: FallbackPolicy = FallbackPolicy.FULL_SPACE,
) -> LabelSpace:
    """Resolve a timestamp to the label space of the tasks active at it.

    One active task yields that task's space; several yield their union.
    With no active task the fallback policy applies: the full universe,
    an error, or an explicitly empty space.
    """
    task_ids = active_tasks_at(schedule, t)
    dangling = [tid for tid in task_ids if not registry.has_task(tid)]
    if dangling:
        raise ValidationError(
            [f"scheduled task {tid!r} does not exist in the registry" for tid in dangling]
        )
    if task_ids:
        return union_label_spaces([label_space_for_task(registry, tid) for tid in task_ids])
    if fallback is FallbackPolicy.FULL_SPACE:
        return LabelSpace(registry, registry.label_ids, Provenance("fallback"))
    if fallback is FallbackPolicy.EMPTY:
        return LabelSpace(registry, (), Provenance("fallback"))
    raise ValidationError(
        f"no scheduled task is active at {format_timestamp(t)} and the fallback policy is 'error'"
    )
