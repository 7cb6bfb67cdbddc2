"""Embedding vectors and the line-oriented files that carry them.

Vectors stand in for encoder outputs. Files store raw, possibly
unnormalized values at 32-bit decimal precision; all in-memory work is
float64. Normalization happens at load so the pipeline does not care
whether an extractor pre-normalized its output: a vector already within
1e-6 of unit norm is kept bit-for-bit (which makes write(read(doc))
reproduce a canonical document exactly), anything else is rescaled.

File format, first line ``dim=<D> kind=<class|clip|pair>`` then one
tab-separated record per line:

    class  <label_id> TAB <v1> ... <vD>
    clip   <clip_id> TAB <ISO-8601 timestamp> TAB <ground_truth or -> TAB <v1> ... <vD>
    pair   <pair_id> TAB <x1> ... <xD> TAB <y1> ... <yD>

Floats are serialized with the shortest decimal representation that
round-trips at float32 precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime

import numpy as np

from .errors import FormatError, ValidationError
from .schedule import format_timestamp, parse_timestamp

ZERO_NORM_EPS = 1e-12
# below this deviation a vector is treated as already unit and returned as-is
EXACT_UNIT_TOL = 1e-12
# stored vectors within this deviation count as normalized and are kept verbatim
STORED_UNIT_TOL = 1e-6


def as_embedding(values, *, where: str = "embedding") -> np.ndarray:
    """Validate and convert to a 1-D float64 vector."""
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1 or v.size < 1:
        raise ValidationError(f"{where} must be a non-empty 1-D vector")
    if not np.all(np.isfinite(v)):
        raise ValidationError(f"{where} contains a non-finite value")
    return v


def normalize(values, *, where: str = "embedding") -> np.ndarray:
    """Scale a vector to unit Euclidean norm, preserving direction.

    Idempotent under identical arithmetic: an input already within
    EXACT_UNIT_TOL of unit norm is returned unchanged, so a second call
    reproduces the first bit-for-bit.
    """
    v = as_embedding(values, where=where)
    norm = float(np.linalg.norm(v))
    if norm < ZERO_NORM_EPS:
        raise ValidationError(f"{where} has zero norm (degenerate embedding)")
    if abs(norm - 1.0) <= EXACT_UNIT_TOL:
        return v
    return v / norm


def mean_pool(frames, *, where: str = "frames") -> np.ndarray:
    """Clip-level embedding from frame embeddings: componentwise mean, renormalized.

    Stand-in for a model-internal frame aggregator; documented and
    testable rather than learned.
    """
    frames = [as_embedding(f, where=f"{where}[{i}]") for i, f in enumerate(frames)]
    if not frames:
        raise ValidationError(f"{where} is empty, nothing to pool")
    dim = frames[0].size
    for i, f in enumerate(frames):
        if f.size != dim:
            raise ValidationError(
                f"{where}[{i}] has dimension {f.size}, expected {dim}"
            )
    mean = np.mean(np.stack(frames), axis=0)
    if float(np.linalg.norm(mean)) < ZERO_NORM_EPS:
        raise ValidationError(f"{where} average out to a zero vector (antipodal frames)")
    return normalize(mean, where=where)


def _load_normalize(values, *, where: str) -> np.ndarray:
    v = as_embedding(values, where=where)
    norm = float(np.linalg.norm(v))
    if norm < ZERO_NORM_EPS:
        raise ValidationError(f"{where} has zero norm (degenerate embedding)")
    if abs(norm - 1.0) <= STORED_UNIT_TOL:
        return v
    return v / norm


def format_float(x: float) -> str:
    """Shortest decimal that round-trips at float32 precision."""
    with np.errstate(over="ignore"):
        x32 = np.float32(x)
    if not np.isfinite(x32):
        raise ValidationError(f"cannot serialize non-finite value {x!r}")
    if x32 == 0.0:
        return "0.0"
    return np.format_float_positional(x32, unique=True, trim="0")


def _format_vector(v) -> str:
    return " ".join(format_float(x) for x in np.asarray(v, dtype=np.float64))


def _parse_floats(text: str, dim: int, *, where: str) -> np.ndarray:
    tokens = text.split()
    if len(tokens) != dim:
        raise FormatError(f"{where} has {len(tokens)} values, header says dim={dim}")
    try:
        values = [float(t) for t in tokens]
    except ValueError as exc:
        raise FormatError(f"{where} has an unparsable value: {exc}") from exc
    for x in values:
        if not math.isfinite(x):
            raise FormatError(f"{where} contains a non-finite value")
    return np.asarray(values, dtype=np.float64)


def _parse_header(line: str) -> tuple[int, str]:
    parts = line.split()
    fields = {}
    for part in parts:
        key, sep, value = part.partition("=")
        if not sep:
            raise FormatError(f"malformed header field {part!r}")
        fields[key] = value
    if set(fields) != {"dim", "kind"}:
        raise FormatError("header must be 'dim=<D> kind=<class|clip|pair>'")
    try:
        dim = int(fields["dim"])
    except ValueError:
        raise FormatError(f"header dim {fields['dim']!r} is not an integer") from None
    if dim < 1:
        raise FormatError(f"header dim must be >= 1, got {dim}")
    if fields["kind"] not in ("class", "clip", "pair"):
        raise FormatError(f"unknown embedding file kind {fields['kind']!r}")
    return dim, fields["kind"]


def _read_lines(document: str, expected_kind: str) -> tuple[int, list[tuple[int, str]]]:
    lines = document.splitlines()
    if not lines:
        raise FormatError("embedding document is empty")
    dim, kind = _parse_header(lines[0])
    if kind != expected_kind:
        raise FormatError(f"expected a kind={expected_kind} file, found kind={kind}")
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            raise FormatError(f"blank line {lineno} in embedding document")
        records.append((lineno, line))
    return dim, records


@dataclass(eq=False)
class ClassEmbeddingTable:
    """Unit-norm class-prompt vectors keyed by label id, one shared dimension."""

    dimension: int
    entries: dict[str, np.ndarray] = field(default_factory=dict)

    def vector(self, label_id: str) -> np.ndarray:
        try:
            return self.entries[label_id]
        except KeyError:
            raise ValidationError(
                f"no class embedding for label {label_id!r}"
            ) from None

    def __contains__(self, label_id: str) -> bool:
        return label_id in self.entries

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(eq=False)
class ClipRecord:
    """One video clip: its embedding, capture time, and optional truth label."""

    clip_id: str
    timestamp: datetime
    embedding: np.ndarray
    ground_truth: str | None = None


def read_embedding_table(document: str) -> ClassEmbeddingTable:
    dim, records = _read_lines(document, "class")
    table = ClassEmbeddingTable(dimension=dim)
    for lineno, line in records:
        parts = line.split("\t")
        if len(parts) != 2:
            raise FormatError(f"class record at line {lineno} must have 2 tab-separated fields")
        label_id, values_text = parts
        label_id = label_id.strip()
        if not label_id:
            raise FormatError(f"class record at line {lineno} has an empty label id")
        if label_id in table.entries:
            raise FormatError(f"duplicate class embedding for label {label_id!r}")
        vec = _parse_floats(values_text, dim, where=f"class record {label_id!r}")
        table.entries[label_id] = _load_normalize(vec, where=f"class embedding {label_id!r}")
    return table


def write_embedding_table(table: ClassEmbeddingTable) -> str:
    lines = [f"dim={table.dimension} kind=class"]
    for label_id, vec in table.entries.items():
        lines.append(f"{label_id}\t{_format_vector(vec)}")
    return "\n".join(lines) + "\n"


def read_clip_set(document: str) -> list[ClipRecord]:
    dim, records = _read_lines(document, "clip")
    clips: list[ClipRecord] = []
    seen: set[str] = set()
    for lineno, line in records:
        parts = line.split("\t")
        if len(parts) != 4:
            raise FormatError(f"clip record at line {lineno} must have 4 tab-separated fields")
        clip_id, ts_text, gt_text, values_text = parts
        clip_id = clip_id.strip()
        if not clip_id:
            raise FormatError(f"clip record at line {lineno} has an empty clip id")
        if clip_id in seen:
            raise FormatError(f"duplicate clip id {clip_id!r}")
        seen.add(clip_id)
        timestamp = parse_timestamp(ts_text)
        gt = gt_text.strip()
        ground_truth = None if gt == "-" else gt
        if ground_truth == "":
            raise FormatError(f"clip {clip_id!r} has an empty ground-truth field (use '-')")
        vec = _parse_floats(values_text, dim, where=f"clip record {clip_id!r}")
        clips.append(
            ClipRecord(
                clip_id=clip_id,
                timestamp=timestamp,
                embedding=_load_normalize(vec, where=f"clip embedding {clip_id!r}"),
                ground_truth=ground_truth,
            )
        )
    return clips


def write_clip_set(clips, dimension: int | None = None) -> str:
    clips = list(clips)
    if dimension is None:
        if not clips:
            raise ValidationError("cannot infer dimension of an empty clip set")
        dimension = int(np.asarray(clips[0].embedding).size)
    lines = [f"dim={dimension} kind=clip"]
    for clip in clips:
        gt = clip.ground_truth if clip.ground_truth is not None else "-"
        lines.append(
            f"{clip.clip_id}\t{format_timestamp(clip.timestamp)}\t{gt}\t{_format_vector(clip.embedding)}"
        )
    return "\n".join(lines) + "\n"


def read_pair_set(document: str) -> list[tuple[str, np.ndarray, np.ndarray]]:
    """Read (id, x, y) embedding pairs for the contrastive-loss diagnostic."""
    dim, records = _read_lines(document, "pair")
    pairs = []
    seen: set[str] = set()
    for lineno, line in records:
        parts = line.split("\t")
        if len(parts) != 3:
            raise FormatError(f"pair record at line {lineno} must have 3 tab-separated fields")
        pair_id, x_text, y_text = parts
        pair_id = pair_id.strip()
        if not pair_id:
            raise FormatError(f"pair record at line {lineno} has an empty id")
        if pair_id in seen:
            raise FormatError(f"duplicate pair id {pair_id!r}")
        seen.add(pair_id)
        x = _parse_floats(x_text, dim, where=f"pair {pair_id!r} x")
        y = _parse_floats(y_text, dim, where=f"pair {pair_id!r} y")
        pairs.append((pair_id, x, y))
    return pairs


def write_pair_set(pairs, dimension: int) -> str:
    lines = [f"dim={dimension} kind=pair"]
    for pair_id, x, y in pairs:
        lines.append(f"{pair_id}\t{_format_vector(x)}\t{_format_vector(y)}")
    return "\n".join(lines) + "\n"
