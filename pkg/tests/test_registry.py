import json

import pytest

from sitescope import (
    Provenance,
    ValidationError,
    label_space_for_task,
    load_registry,
    union_label_spaces,
)

TABLE1_ORDER = [
    "clamping", "grinding", "drilling", "measuring", "marking", "cutting",
    "nail-gunning", "sawing", "picking-up-trash", "shoveling",
    "using-a-screwdriver", "hammering", "mixing-cement", "driving",
    "blowtorching", "laying-bricks", "soldering", "painting",
]


def doc(labels=None, tasks=None):
    labels = labels if labels is not None else [
        {"id": "a", "prompt": "doing a"},
        {"id": "b", "prompt": "doing b"},
        {"id": "c", "prompt": "doing c"},
    ]
    return json.dumps({"labels": labels, "tasks": tasks or []})


def test_fixture_universe_order(registry):
    assert list(registry.label_ids) == TABLE1_ORDER
    assert len(registry.full_space()) == 18


def test_fixture_task_sizes(registry):
    assert len(label_space_for_task(registry, "task-1")) == 6
    assert len(label_space_for_task(registry, "task-2")) == 5


def test_fixture_union_is_seven(registry):
    union = union_label_spaces(
        [label_space_for_task(registry, "task-1"), label_space_for_task(registry, "task-2")]
    )
    assert list(union.label_ids) == TABLE1_ORDER[:7]
    assert union.provenance.kind == "union"
    assert union.provenance.task_ids == ("task-1", "task-2")


def test_label_ids_are_normalized():
    reg = load_registry(doc(labels=[{"id": "  Hammering ", "prompt": "hammering"}]))
    assert reg.label_ids == ("hammering",)


def test_duplicate_label_id_rejected():
    with pytest.raises(ValidationError, match="duplicate label id 'a'"):
        load_registry(doc(labels=[
            {"id": "a", "prompt": "x"},
            {"id": "A ", "prompt": "y"},
        ]))


def test_all_violations_reported_together():
    bad = doc(
        labels=[{"id": "a", "prompt": ""}, {"id": "a", "prompt": "x"}],
        tasks=[{"id": "t", "activities": ["ghost"]}],
    )
    with pytest.raises(ValidationError) as err:
        load_registry(bad)
    text = str(err.value)
    assert "empty prompt" in text
    assert "duplicate label id" in text
    assert "unknown activity 'ghost'" in text
    assert len(err.value.diagnostics) == 3


def test_task_without_activities_rejected():
    with pytest.raises(ValidationError, match="has no activities"):
        load_registry(doc(tasks=[{"id": "t", "activities": []}]))


def test_task_listing_activity_twice_rejected():
    with pytest.raises(ValidationError, match="more than once"):
        load_registry(doc(tasks=[{"id": "t", "activities": ["a", "a"]}]))


def test_label_id_with_inner_whitespace_rejected():
    with pytest.raises(ValidationError, match="whitespace"):
        load_registry(doc(labels=[{"id": "nail gunning", "prompt": "x"}]))


def test_unknown_task_lookup_names_it(registry):
    with pytest.raises(ValidationError, match="task-9"):
        label_space_for_task(registry, "task-9")


def test_space_sorts_and_collapses_duplicates(registry):
    space = registry.space(
        ["cutting", "clamping", "cutting", "drilling"], Provenance("full")
    )
    assert list(space.label_ids) == ["clamping", "drilling", "cutting"]


def test_space_rejects_unknown_label(registry):
    with pytest.raises(ValidationError, match="unknown"):
        registry.space(["welding"], Provenance("full"))


def test_union_of_one_space_is_unchanged(registry):
    only = label_space_for_task(registry, "task-2")
    assert union_label_spaces([only]) is only


def test_union_of_nothing_rejected():
    with pytest.raises(ValidationError, match="empty"):
        union_label_spaces([])


def test_union_across_registries_rejected(registry):
    other = load_registry(doc(tasks=[{"id": "t", "activities": ["a"]}]))
    with pytest.raises(ValidationError, match="different registries"):
        union_label_spaces([registry.full_space(), other.full_space()])


def test_union_order_ignores_argument_order(registry):
    t1 = label_space_for_task(registry, "task-1")
    t2 = label_space_for_task(registry, "task-2")
    a = union_label_spaces([t1, t2])
    b = union_label_spaces([t2, t1])
    assert a.label_ids == b.label_ids
    assert a.provenance.task_ids == b.provenance.task_ids


def test_label_space_serialization(registry):
    space = label_space_for_task(registry, "task-2")
    d = space.as_dict()
    assert d["labels"] == ["drilling", "measuring", "marking", "cutting", "nail-gunning"]
    assert d["provenance"] == {"kind": "task", "tasks": ["task-2"]}


def test_subset_relation(registry):
    t1 = label_space_for_task(registry, "task-1")
    assert t1.is_subset_of(registry.full_space())
    assert not registry.full_space().is_subset_of(t1)


def test_malformed_document_is_a_format_error():
    from sitescope import FormatError

    with pytest.raises(FormatError):
        load_registry("not json at all {")
    with pytest.raises(FormatError):
        load_registry(json.dumps({"tasks": []}))
