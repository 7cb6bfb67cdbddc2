import argparse
import sys
from pathlib import Path

from .errors import ExtractorError, JobValidationError, ManifestError
from .job import parse_job
from .runner import run_job


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="siteextract",
        description="Produce class and clip embedding files from a job manifest.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="execute a job manifest")
    p.add_argument("--manifest", required=True, help="job manifest JSON path")
    p.set_defaults(func=cmd_run)
    return parser


def cmd_run(args) -> int:
    job = parse_job(Path(args.manifest).read_text(encoding="utf-8"))
    summary = run_job(job)
    print(
        f"wrote {job.class_output} ({summary['classes']} labels, "
        f"dim {summary['dimension']})"
    )
    if summary["clips"]:
        print(f"wrote {job.clip_output} ({summary['clips']} clips)")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except JobValidationError as exc:
        for d in exc.diagnostics:
            print(f"error: {d}", file=sys.stderr)
        return 1
    except ManifestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ExtractorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
