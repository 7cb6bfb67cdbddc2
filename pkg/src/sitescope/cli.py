"""Command-line interface.

Subcommands: validate, resolve, predict, evaluate, compare, infonce.
Machine output goes to stdout (or --output) as canonical JSON: keys
sorted, stable separators, no timestamps unless --stamp is given, so a
rerun on identical inputs is byte identical.

Exit codes: 0 success, 1 validation failure, 2 usage or file errors.
"""

from __future__ import annotations

import argparse
import sys
from datetime import datetime, timezone
from pathlib import Path

from .classifier import ScheduleScopedClassifier
from .embeddings import read_clip_set, read_embedding_table, read_pair_set
from .errors import FormatError, ValidationError
from .metrics import (
    Averaging,
    RunReport,
    build_confusion,
    compare_runs,
    compute_metrics,
    confidence_stats,
)
from .records import canonical_json, parse_prediction_lines, prediction_to_record, truths_from_records
from .registry import load_registry
from .schedule import (
    FallbackPolicy,
    active_tasks_at,
    format_timestamp,
    parse_schedule,
    parse_timestamp,
    resolve_label_space,
)
from .scoring import info_nce


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _emit(text: str, output: str | None):
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


def _load_inputs(args):
    """Load whichever artifacts the command was given, in a fixed order."""
    loaded = {}
    if getattr(args, "registry", None):
        loaded["registry"] = load_registry(_read_text(args.registry))
    if getattr(args, "schedule", None):
        loaded["schedule"] = parse_schedule(_read_text(args.schedule))
    if getattr(args, "classes", None):
        loaded["classes"] = read_embedding_table(_read_text(args.classes))
    if getattr(args, "clips", None):
        loaded["clips"] = read_clip_set(_read_text(args.clips))
    return loaded


def cmd_validate(args) -> int:
    if not (args.registry or args.schedule or args.classes or args.clips):
        print("error: nothing to validate; pass at least one artifact", file=sys.stderr)
        return 2

    diagnostics: list[str] = []
    loaded = {}
    for name, loader in (
        ("registry", lambda: load_registry(_read_text(args.registry))),
        ("schedule", lambda: parse_schedule(_read_text(args.schedule))),
        ("classes", lambda: read_embedding_table(_read_text(args.classes))),
        ("clips", lambda: read_clip_set(_read_text(args.clips))),
    ):
        if getattr(args, name, None):
            try:
                loaded[name] = loader()
            except ValidationError as exc:
                diagnostics.extend(f"{name}: {d}" for d in exc.diagnostics)

    registry = loaded.get("registry")
    schedule = loaded.get("schedule")
    classes = loaded.get("classes")
    clips = loaded.get("clips")

    if registry is not None and schedule is not None:
        for tid in sorted({e.task_id for e in schedule.entries}):
            if not registry.has_task(tid):
                diagnostics.append(
                    f"schedule: task {tid!r} does not exist in the registry"
                )
    if registry is not None and classes is not None:
        for lid in registry.label_ids:
            if lid not in classes:
                diagnostics.append(f"classes: no embedding for registry label {lid!r}")
        for lid in sorted(classes.entries):
            if not registry.has_label(lid):
                diagnostics.append(
                    f"classes: embedding for {lid!r} matches no registry label"
                )
    if registry is not None and clips is not None:
        for clip in clips:
            gt = clip.ground_truth
            if gt is not None and not registry.has_label(gt):
                diagnostics.append(
                    f"clips: clip {clip.clip_id!r} has ground truth {gt!r} "
                    f"outside the registry"
                )
    if classes is not None and clips is not None:
        for clip in clips:
            if clip.embedding.size != classes.dimension:
                diagnostics.append(
                    f"clips: clip {clip.clip_id!r} has dimension {clip.embedding.size}, "
                    f"class embeddings have {classes.dimension}"
                )

    if diagnostics:
        for d in diagnostics:
            print(d)
        return 1
    print("ok")
    return 0


def cmd_resolve(args) -> int:
    registry = load_registry(_read_text(args.registry))
    schedule = parse_schedule(_read_text(args.schedule))
    at = parse_timestamp(args.at)
    space = resolve_label_space(schedule, registry, at, FallbackPolicy(args.fallback))
    obj = {
        "at": format_timestamp(at),
        "active_tasks": active_tasks_at(schedule, at),
        "labels": list(space.label_ids),
        "provenance": space.provenance.as_dict(),
    }
    _emit(canonical_json(obj) + "\n", args.output)
    return 0


def cmd_predict(args) -> int:
    registry = load_registry(_read_text(args.registry))
    table = read_embedding_table(_read_text(args.classes))
    schedule = parse_schedule(_read_text(args.schedule)) if args.schedule else None
    clips = sorted(read_clip_set(_read_text(args.clips)), key=lambda c: c.clip_id)

    problems: list[str] = []
    for clip in clips:
        if clip.embedding.size != table.dimension:
            problems.append(
                f"clip {clip.clip_id!r} has dimension {clip.embedding.size}, "
                f"class embeddings have {table.dimension}"
            )
        gt = clip.ground_truth
        if gt is not None and not registry.has_label(gt):
            problems.append(
                f"clip {clip.clip_id!r} has ground truth {gt!r} outside the registry"
            )
    if problems:
        raise ValidationError(problems)

    clf = ScheduleScopedClassifier(
        registry=registry,
        class_table=table,
        schedule=schedule,
        mode=args.mode,
        tau=args.tau,
        penalty_lambda=args.penalty_lambda,
        fallback=args.fallback,
    ).fit()

    lines = []
    if args.stamp:
        now = datetime.now(timezone.utc)
        lines.append(canonical_json({"_meta": {"generated_at": format_timestamp(now)}}))
    if not clips:
        print("warning: clip set is empty; nothing to score", file=sys.stderr)
    else:
        for clip, pred in zip(clips, clf.predict_records(clips)):
            lines.append(
                canonical_json(prediction_to_record(pred, clip.ground_truth, args.fallback))
            )
    _emit("".join(line + "\n" for line in lines), args.output)
    return 0


def _rendered_table(metrics) -> str:
    header = "accuracy precision recall f1"
    row = (
        f"{metrics.accuracy * 100:.2f}% "
        f"{metrics.precision:.2f} {metrics.recall:.2f} {metrics.f1:.2f}"
    )
    return header + "\n" + row + "\n"


def _load_run(path: str):
    records = parse_prediction_lines(_read_text(path), source=path)
    if not records:
        raise ValidationError(f"{path}: prediction file contains no records")
    return records


def _evaluation_labels(records, truths, registry_path):
    """Label universe for the confusion matrix.

    With a registry: its full label order. Without: the observed truth
    and predicted labels, sorted.
    """
    if registry_path:
        return load_registry(_read_text(registry_path)).label_ids
    return sorted(set(truths.values()) | {r.predicted_label for r in records})


def cmd_evaluate(args) -> int:
    records = _load_run(args.predictions)
    truths = truths_from_records(records)
    labels = _evaluation_labels(records, truths, args.registry)
    cm = build_confusion(records, truths, labels)
    metrics = compute_metrics(cm, Averaging(args.averaging))
    confidence = confidence_stats(records, truths)
    report = RunReport(metrics=metrics, confidence=confidence)
    out = canonical_json(report.as_dict()) + "\n"
    if args.table:
        out += _rendered_table(metrics)
    _emit(out, args.output)
    return 0


def cmd_compare(args) -> int:
    baseline = _load_run(args.baseline)
    restricted = _load_run(args.restricted)
    truths = truths_from_records(baseline)
    for cid, gt in truths_from_records(restricted).items():
        if cid in truths and truths[cid] != gt:
            raise ValidationError(
                f"clip {cid!r} has conflicting ground truth across runs: "
                f"{truths[cid]!r} vs {gt!r}"
            )
        truths[cid] = gt
    labels = None
    if args.registry:
        labels = load_registry(_read_text(args.registry)).label_ids
    report = compare_runs(
        baseline, restricted, truths, labels=labels, averaging=Averaging(args.averaging)
    )
    _emit(canonical_json(report.as_dict()) + "\n", args.output)
    return 0


def cmd_infonce(args) -> int:
    pairs = read_pair_set(_read_text(args.pairs))
    loss = info_nce([(x, y) for _, x, y in pairs], args.tau)
    _emit(canonical_json({"loss": loss, "pairs": len(pairs), "tau": args.tau}) + "\n", args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sitescope",
        description="Schedule-scoped zero-shot activity classification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check artifacts and their cross-references")
    p.add_argument("--registry", help="label registry JSON")
    p.add_argument("--schedule", help="task schedule JSON")
    p.add_argument("--classes", help="class embedding file")
    p.add_argument("--clips", help="clip embedding file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("resolve", help="label space active at a timestamp")
    p.add_argument("--registry", required=True)
    p.add_argument("--schedule", required=True)
    p.add_argument("--at", required=True, help="ISO-8601 timestamp with offset")
    p.add_argument("--fallback", choices=["full", "error", "empty"], default="full")
    p.add_argument("--output")
    p.set_defaults(func=cmd_resolve)

    p = sub.add_parser("predict", help="score clips against class embeddings")
    p.add_argument("--registry", required=True)
    p.add_argument("--classes", required=True)
    p.add_argument("--clips", required=True)
    p.add_argument("--schedule", help="required for hard and soft modes")
    p.add_argument("--mode", choices=["off", "hard", "soft"], default="off")
    p.add_argument("--tau", type=float, default=0.01)
    p.add_argument("--lambda", dest="penalty_lambda", type=float, default=0.0)
    p.add_argument("--fallback", choices=["full", "error", "empty"], default="full")
    p.add_argument("--stamp", action="store_true", help="prepend a run-metadata line")
    p.add_argument("--output")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="metrics and confidence for one run")
    p.add_argument("--predictions", required=True)
    p.add_argument("--averaging", choices=["weighted", "macro", "micro"], default="weighted")
    p.add_argument("--registry", help="index the confusion matrix by registry order")
    p.add_argument("--table", action="store_true", help="append a rendered metrics row")
    p.add_argument("--output")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="baseline run vs restricted run")
    p.add_argument("--baseline", required=True)
    p.add_argument("--restricted", required=True)
    p.add_argument("--averaging", choices=["weighted", "macro", "micro"], default="weighted")
    p.add_argument("--registry")
    p.add_argument("--output")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("infonce", help="contrastive diagnostic loss over pairs")
    p.add_argument("--pairs", required=True)
    p.add_argument("--tau", type=float, default=0.01)
    p.add_argument("--output")
    p.set_defaults(func=cmd_infonce)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        for d in exc.diagnostics:
            print(f"error: {d}", file=sys.stderr)
        return 1
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
