from __future__ import annotations

from pathlib import Path

from .backends import get_backend
from .job import ExtractionJob


def run_job(job: ExtractionJob) -> dict:
    """Execute one extraction job; returns a small summary dict.

    Prompts are embedded in manifest order, then videos sequentially
    (one backend instance, no parallelism: determinism is the point at
    this scale). The class file is always written; the clip file only
    when the manifest lists videos.
    """
    backend = get_backend(job)
    dimension = backend.dimension

    entries = {spec.label: backend.embed_text(spec.prompt) for spec in job.prompts}

    from .writer import write_class_file, write_clip_file

    write_class_file(Path(job.class_output), entries, dimension)
    summary = {"classes": len(entries), "dimension": dimension, "clips": 0}

    if job.videos and job.clip_output:
        records = [
            (
                spec.clip_id,
                spec.timestamp,
                spec.ground_truth,
                backend.embed_video(spec.path, job.frame_count),
            )
            for spec in job.videos
        ]
        write_clip_file(Path(job.clip_output), records, dimension)
        summary["clips"] = len(records)
    return summary
