"""Writers for the downstream pipeline's embedding file formats.

Layout, kept in sync with the consumer's loader by the conformance tests
rather than by a shared import:

    dim=<D> kind=class          dim=<D> kind=clip
    <label>\t<floats>           <clip_id>\t<timestamp>\t<gt or ->\t<floats>

Floats are space separated within one tab field. Values are written at
full float64 precision so the consumer reads back exactly what the
backend produced.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ExtractorError


def _format_vector(vector: np.ndarray) -> str:
    out = []
    for x in np.asarray(vector, dtype=np.float64):
        if not math.isfinite(x):
            raise ExtractorError("refusing to write a non-finite embedding value")
        out.append(repr(float(x)))
    return " ".join(out)


def write_class_file(path, entries: dict[str, np.ndarray], dimension: int) -> None:
    lines = [f"dim={dimension} kind=class"]
    for label, vector in entries.items():
        if vector.shape != (dimension,):
            raise ExtractorError(
                f"class vector for {label!r} has dimension {vector.size}, job says {dimension}"
            )
        lines.append(f"{label}\t{_format_vector(vector)}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_clip_file(path, records, dimension: int) -> None:
    """records: iterable of (clip_id, timestamp, ground_truth_or_None, vector)."""
    lines = [f"dim={dimension} kind=clip"]
    for clip_id, timestamp, ground_truth, vector in records:
        if vector.shape != (dimension,):
            raise ExtractorError(
                f"clip vector for {clip_id!r} has dimension {vector.size}, job says {dimension}"
            )
        gt = ground_truth if ground_truth is not None else "-"
        lines.append(f"{clip_id}\t{timestamp}\t{gt}\t{_format_vector(vector)}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
