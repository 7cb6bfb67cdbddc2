"""Activity label universe and task-to-activity mappings.

The registry is the single source of label order: every label space and
probability vector downstream is indexed against the registry ordering,
which removes positional ambiguity between modules. Registries are
immutable after load and safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import FormatError, ValidationError

PROVENANCE_KINDS = ("full", "task", "union", "fallback")


@dataclass(frozen=True)
class ActivityLabel:
    """One recognizable low-level activity.

    ``id`` is the stable lowercase token used as a key everywhere;
    ``display_name`` is the human-facing string and ``prompt`` the free
    text handed to a text encoder for class-embedding extraction.
    """

    id: str
    display_name: str
    prompt: str


@dataclass(frozen=True)
class TaskDefinition:
    """A high-level scheduled work item decomposed into activity ids."""

    id: str
    name: str
    activity_ids: tuple[str, ...]


@dataclass(frozen=True)
class Provenance:
    """How a label space was obtained: full universe, a single task,
    a union of tasks, or a fallback outside any scheduled window."""

    kind: str
    task_ids: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in PROVENANCE_KINDS:
            raise ValidationError(f"unknown provenance kind {self.kind!r}")

    def as_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.kind in ("task", "union"):
            d["tasks"] = list(self.task_ids)
        return d


@dataclass(frozen=True)
class LabelRegistry:
    labels: tuple[ActivityLabel, ...]
    tasks: tuple[TaskDefinition, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)
    _task_map: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(
            self, "_index", {lab.id: i for i, lab in enumerate(self.labels)}
        )
        object.__setattr__(self, "_task_map", {t.id: t for t in self.tasks})

    @property
    def label_ids(self) -> tuple[str, ...]:
        return tuple(lab.id for lab in self.labels)

    def label_index(self, label_id: str) -> int:
        try:
            return self._index[label_id]
        except KeyError:
            raise ValidationError(f"unknown label id {label_id!r}") from None

    def has_label(self, label_id: str) -> bool:
        return label_id in self._index

    def task(self, task_id: str) -> TaskDefinition:
        try:
            return self._task_map[task_id]
        except KeyError:
            raise ValidationError(f"unknown task id {task_id!r}") from None

    def has_task(self, task_id: str) -> bool:
        return task_id in self._task_map

    def space(self, label_ids, provenance: Provenance) -> LabelSpace:
        """Build a label space over this registry in canonical order.

        Duplicates collapse; order of the input is irrelevant because the
        output always follows registry order.
        """
        indices = sorted({self.label_index(lid) for lid in label_ids})
        return LabelSpace(
            registry=self,
            label_ids=tuple(self.labels[i].id for i in indices),
            provenance=provenance,
        )

    def full_space(self) -> LabelSpace:
        return LabelSpace(self, self.label_ids, Provenance("full"))


@dataclass(frozen=True)
class LabelSpace:
    """An ordered subset of a registry's label universe.

    The ordering always matches registry order, so the same label set
    serializes identically regardless of how it was constructed.
    """

    registry: LabelRegistry
    label_ids: tuple[str, ...]
    provenance: Provenance

    def __len__(self) -> int:
        return len(self.label_ids)

    def __contains__(self, label_id: str) -> bool:
        return label_id in self.label_ids

    def is_subset_of(self, other: LabelSpace) -> bool:
        return set(self.label_ids) <= set(other.label_ids)

    def as_dict(self) -> dict:
        return {"labels": list(self.label_ids), "provenance": self.provenance.as_dict()}


def _normalize_label_id(raw) -> str:
    return str(raw).strip().lower()


def load_registry(document: str) -> LabelRegistry:
    """Parse a registry document (JSON text) into a validated LabelRegistry.

    Raises FormatError for malformed documents and ValidationError, with
    one diagnostic per violation, for domain problems such as duplicate
    ids or task references to labels that do not exist.
    """
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise FormatError(f"registry document is not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or not isinstance(data.get("labels"), list):
        raise FormatError("registry document must be an object with a 'labels' array")
    raw_tasks = data.get("tasks", [])
    if not isinstance(raw_tasks, list):
        raise FormatError("registry 'tasks' must be an array")

    diagnostics: list[str] = []
    labels: list[ActivityLabel] = []
    seen_labels: set[str] = set()
    for pos, entry in enumerate(data["labels"]):
        if not isinstance(entry, dict) or "id" not in entry:
            raise FormatError(f"label entry #{pos} must be an object with an 'id'")
        lid = _normalize_label_id(entry["id"])
        if not lid:
            diagnostics.append(f"label entry #{pos} has an empty id")
            continue
        if any(ch.isspace() for ch in lid):
            diagnostics.append(f"label id {lid!r} contains whitespace")
        if lid in seen_labels:
            diagnostics.append(f"duplicate label id {lid!r}")
        seen_labels.add(lid)
        display = str(entry.get("display_name", "")).strip()
        prompt = str(entry.get("prompt", "")).strip()
        if not prompt:
            diagnostics.append(f"label {lid!r} has an empty prompt")
        labels.append(ActivityLabel(id=lid, display_name=display or lid, prompt=prompt))

    tasks: list[TaskDefinition] = []
    seen_tasks: set[str] = set()
    for pos, entry in enumerate(raw_tasks):
        if not isinstance(entry, dict) or "id" not in entry:
            raise FormatError(f"task entry #{pos} must be an object with an 'id'")
        tid = str(entry["id"]).strip()
        if not tid:
            diagnostics.append(f"task entry #{pos} has an empty id")
            continue
        if tid in seen_tasks:
            diagnostics.append(f"duplicate task id {tid!r}")
        seen_tasks.add(tid)
        raw_acts = entry.get("activities", [])
        if not isinstance(raw_acts, list):
            raise FormatError(f"task {tid!r} 'activities' must be an array")
        acts = [_normalize_label_id(a) for a in raw_acts]
        if not acts:
            diagnostics.append(f"task {tid!r} has no activities")
        dupes = {a for a in acts if acts.count(a) > 1}
        for a in sorted(dupes):
            diagnostics.append(f"task {tid!r} lists activity {a!r} more than once")
        for a in acts:
            if a not in seen_labels:
                diagnostics.append(
                    f"task {tid!r} references unknown activity {a!r}"
                )
        tasks.append(
            TaskDefinition(id=tid, name=str(entry.get("name", tid)), activity_ids=tuple(acts))
        )

    if diagnostics:
        raise ValidationError(diagnostics)
    return LabelRegistry(labels=tuple(labels), tasks=tuple(tasks))


def label_space_for_task(registry: LabelRegistry, task_id: str) -> LabelSpace:
    """Restrict the label universe to one task's activity set."""
    task = registry.task(task_id)
    return registry.space(task.activity_ids, Provenance("task", (task_id,)))


def union_label_spaces(spaces) -> LabelSpace:
    """Union of label spaces from the same registry, in canonical order.

    A single-space input is returned unchanged. For multiple inputs the
    provenance records the sorted union of contributing task ids.
    """
    spaces = list(spaces)
    if not spaces:
        raise ValidationError("cannot union an empty list of label spaces")
    registry = spaces[0].registry
    for s in spaces[1:]:
        if s.registry is not registry and s.registry != registry:
            raise ValidationError("cannot union label spaces from different registries")
    if len(spaces) == 1:
        return spaces[0]
    ids: set[str] = set()
    task_ids: set[str] = set()
    for s in spaces:
        ids.update(s.label_ids)
        task_ids.update(s.provenance.task_ids)
    return registry.space(ids, Provenance("union", tuple(sorted(task_ids))))
