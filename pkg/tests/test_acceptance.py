"""Acceptance checklist for the shipped behavior.

Every test here guards one headline guarantee and prints a PASS/FAIL
line, so `pytest -s tests/test_acceptance.py` reads as a checklist.
Tolerances are part of the contract and are asserted as stated, not
loosened to make runs green.
"""

import contextlib
import json
import math
import pathlib
import time

import numpy as np

from sitescope import (
    ConfusionMatrix,
    Provenance,
    compute_metrics,
    info_nce,
    label_space_for_task,
    load_registry,
    restrict_soft,
    softmax,
    union_label_spaces,
)
from sitescope.cli import main
from sitescope.records import parse_prediction_lines
from sitescope.scoring import LogitVector

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"
REGISTRY = str(FIXTURES / "table1_registry.json")
SCHEDULE = str(FIXTURES / "site_schedule.json")
CLASSES = str(FIXTURES / "class_embeddings_d32.txt")


@contextlib.contextmanager
def checklist(name):
    try:
        yield
    except BaseException:
        print(f"{name}: FAIL")
        raise
    print(f"{name}: PASS")


def random_case(rng):
    """One random full-space logit vector plus a proper subset holding a probe."""
    dim = int(rng.integers(2, 51))
    logits = rng.uniform(-100.0, 100.0, dim)
    subset_size = int(rng.integers(1, dim))
    subset = np.sort(rng.choice(dim, size=subset_size, replace=False))
    probe = int(rng.choice(subset))
    return logits, subset, probe


def test_restriction_monotonicity_sweep():
    rng = np.random.default_rng(2023)
    started = time.perf_counter()
    with checklist("restriction monotonicity (1000-case sweep)"):
        for _ in range(1000):
            logits, subset, probe = random_case(rng)
            p_full = softmax(logits)
            p_sub = softmax(logits[subset])
            probe_pos = int(np.where(subset == probe)[0][0])
            removed_mass = 1.0 - float(p_full[subset].sum())
            assert p_sub[probe_pos] >= p_full[probe] * (1.0 - 1e-12)
            if removed_mass > 1e-12:
                assert p_sub[probe_pos] > p_full[probe]
        elapsed = time.perf_counter() - started
        assert elapsed < 5.0, f"sweep took {elapsed:.2f}s"


def test_argmax_preservation_sweep():
    rng = np.random.default_rng(2024)
    with checklist("argmax preservation under restriction"):
        violations = 0
        hits = 0
        for _ in range(1000):
            logits, subset, _ = random_case(rng)
            full_argmax = int(np.argmax(logits))
            if full_argmax not in subset:
                continue
            hits += 1
            p_sub = softmax(logits[subset])
            if int(subset[np.argmax(p_sub)]) != full_argmax:
                violations += 1
        assert hits > 100  # the sweep must actually exercise the property
        assert violations == 0


def _soft_case_spaces():
    labels = [{"id": f"l{i}", "prompt": f"doing l{i}"} for i in range(50)]
    tasks = [{"id": "t", "activities": [lab["id"] for lab in labels]}]
    return load_registry(json.dumps({"labels": labels, "tasks": tasks}))


def test_soft_restriction_limits():
    reg = _soft_case_spaces()
    rng = np.random.default_rng(2025)
    with checklist("soft restriction limit behavior (100 cases)"):
        for _ in range(100):
            dim = int(rng.integers(2, 31))
            ids = [f"l{i}" for i in range(dim)]
            full = reg.space(ids, Provenance("full", ()))
            keep_idx = np.sort(
                rng.choice(dim, size=int(rng.integers(1, dim)), replace=False)
            )
            restricted = reg.space([ids[i] for i in keep_idx], Provenance("task", ("t",)))
            raw = rng.uniform(-20.0, 20.0, dim)
            logits = LogitVector(values=raw, label_space=full)

            # lambda = 0 is a no-op
            assert np.array_equal(
                softmax(restrict_soft(logits, restricted, 0.0)), softmax(raw)
            )

            # lambda -> infinity converges to hard restriction
            p_soft = softmax(restrict_soft(logits, restricted, 1e9))
            p_hard = softmax(raw[keep_idx])
            assert np.max(np.abs(p_soft[keep_idx] - p_hard)) <= 1e-9

            # surviving probabilities climb with the penalty
            prev = softmax(restrict_soft(logits, restricted, 0.0))[keep_idx]
            for lam in (0.5, 1.0, 2.0, 5.0, 10.0):
                cur = softmax(restrict_soft(logits, restricted, lam))[keep_idx]
                assert np.all(cur >= prev - 1e-12)
                prev = cur


def _predict(tmp, clips_name, mode, out_name):
    out = tmp / out_name
    argv = [
        "predict", "--registry", REGISTRY, "--classes", CLASSES,
        "--clips", str(FIXTURES / clips_name), "--schedule", SCHEDULE,
        "--mode", mode, "--tau", "0.05", "--output", str(out),
    ]
    assert main(argv) == 0
    return out


def _evaluate(tmp, predictions, out_name):
    out = tmp / out_name
    argv = [
        "evaluate", "--predictions", str(predictions),
        "--registry", REGISTRY, "--table", "--output", str(out),
    ]
    assert main(argv) == 0
    lines = out.read_text().splitlines()
    return json.loads(lines[0]), lines[-1]


def _random_confusion(rng):
    k = int(rng.integers(2, 11))
    counts = rng.integers(0, 21, size=(k, k))
    if counts.sum() == 0:
        counts[0, 0] = 1
    return ConfusionMatrix(
        labels=tuple(f"L{i}" for i in range(k)), counts=counts
    )


def test_headline_metric_arithmetic(tmp_path):
    expected = [
        ("clips_task1.txt", "off", 35.71),
        ("clips_task1.txt", "hard", 57.14),
        ("clips_task2.txt", "off", 23.08),
        ("clips_task2.txt", "hard", 53.85),
    ]
    with checklist("headline metric arithmetic (fixture runs + 500 random matrices)"):
        for i, (clips, mode, pct) in enumerate(expected):
            preds = _predict(tmp_path, clips, mode, f"p{i}.jsonl")
            report, rendered = _evaluate(tmp_path, preds, f"e{i}.json")
            acc = report["metrics"]["accuracy"]
            assert abs(acc * 100.0 - pct) <= 0.005, (clips, mode, acc)
            averages = report["metrics"]["averages"]
            assert abs(averages["weighted"]["recall"] - acc) <= 1e-12
            assert averages["micro"] == {"precision": acc, "recall": acc, "f1": acc}
            if (clips, mode) == ("clips_task1.txt", "hard"):
                assert rendered == "57.14% 0.41 0.57 0.48"

        rng = np.random.default_rng(2026)
        for _ in range(500):
            cm = _random_confusion(rng)
            report = compute_metrics(cm)
            assert abs(report.averages["weighted"]["recall"] - report.accuracy) <= 1e-12
            micro = report.averages["micro"]
            assert micro["precision"] == report.accuracy
            assert micro["recall"] == report.accuracy
            assert micro["f1"] == report.accuracy


def test_label_space_sizes(registry):
    with checklist("label space sizes (6 / 5 / 7 / 18)"):
        t1 = label_space_for_task(registry, "task-1")
        t2 = label_space_for_task(registry, "task-2")
        assert len(t1) == 6
        assert len(t2) == 5
        assert len(union_label_spaces([t1, t2])) == 7
        assert len(registry.full_space()) == 18


def test_contrastive_loss_reference_values():
    with checklist("contrastive loss reference values"):
        x = np.array([1.0, 0.0])
        assert info_nce([(x, x)], tau=0.73) == 0.0

        e0, e1 = np.eye(2)
        loss = info_nce([(e0, e0), (e1, e1)], tau=1.0)
        assert abs(loss - math.log1p(math.exp(-1.0))) <= 1e-9


def test_end_to_end_confidence_lift(tmp_path):
    started = time.perf_counter()
    with checklist("end-to-end confidence lift on the synthetic site"):
        base = _predict(tmp_path, "clips_e2e.txt", "off", "base.jsonl")
        rest = _predict(tmp_path, "clips_e2e.txt", "hard", "rest.jsonl")

        base_records = parse_prediction_lines(base.read_text(), source="base")
        rest_records = parse_prediction_lines(rest.read_text(), source="rest")
        assert len(base_records) >= 50

        # the distractor noise must actually push a big slice of the
        # full-space argmaxes outside the scheduled task's label set
        distracted = sum(
            b.predicted_label not in set(r.restricted_space["labels"])
            for b, r in zip(base_records, rest_records)
        )
        assert distracted >= 0.30 * len(base_records)

        out = tmp_path / "cmp.json"
        argv = [
            "compare", "--baseline", str(base), "--restricted", str(rest),
            "--registry", REGISTRY, "--output", str(out),
        ]
        assert main(argv) == 0
        report = json.loads(out.read_text())
        assert (
            report["restricted"]["metrics"]["accuracy"]
            >= report["baseline"]["metrics"]["accuracy"]
        )
        lifts = report["deltas"]["per_clip_confidence"]
        assert len(lifts) == len(base_records)
        assert all(delta > 0.0 for delta in lifts.values())

        elapsed = time.perf_counter() - started
        assert elapsed < 10.0, f"end-to-end run took {elapsed:.2f}s"


def test_deterministic_prediction_output(tmp_path):
    with checklist("deterministic machine output"):
        a = _predict(tmp_path, "clips_e2e.txt", "hard", "a.jsonl")
        b = _predict(tmp_path, "clips_e2e.txt", "hard", "b.jsonl")
        assert a.read_bytes() == b.read_bytes()
