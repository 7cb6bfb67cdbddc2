"""Offline embedding extraction for the sitescope pipeline.

Turns a job manifest (prompts plus optional videos) into the embedding
files sitescope consumes. Two backends: a deterministic content-hash stub
for offline work and tests, and a pretrained video-text model behind an
optional extra. This package never imports sitescope; the file formats
are the contract.
"""

from .backends import StubBackend, XClipBackend, get_backend
from .errors import ExtractorError, JobValidationError, ManifestError
from .job import (
    DEFAULT_FRAME_COUNT,
    DEFAULT_PROMPT_TEMPLATE,
    ExtractionJob,
    PromptSpec,
    VideoSpec,
    parse_job,
)
from .runner import run_job
from .writer import write_class_file, write_clip_file

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_FRAME_COUNT",
    "DEFAULT_PROMPT_TEMPLATE",
    "ExtractionJob",
    "ExtractorError",
    "JobValidationError",
    "ManifestError",
    "PromptSpec",
    "StubBackend",
    "VideoSpec",
    "XClipBackend",
    "get_backend",
    "parse_job",
    "run_job",
    "write_class_file",
    "write_clip_file",
]
