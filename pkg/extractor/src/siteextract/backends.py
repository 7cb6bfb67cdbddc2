"""Embedding backends.

StubBackend is the deterministic default: it derives vectors from content
hashes, so identical inputs give identical embeddings on any machine with
no model download. It exists so the full extraction pipeline (manifest ->
files) is testable offline; the vectors carry no semantics.

XClipBackend drives a pretrained video-text checkpoint through
transformers. It is import-guarded: constructing it without torch and
transformers installed raises a clear error instead of an ImportError
at module load.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

import numpy as np

from .errors import ExtractorError


def _hash_rng(*parts: bytes) -> np.random.Generator:
    digest = hashlib.sha256(b"\x00".join(parts)).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "big"))


def _unit(v: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise ExtractorError("embedding collapsed to the zero vector")
    return v / norm


class StubBackend:
    """Content-hash embeddings; deterministic, offline, semantics-free."""

    def __init__(self, dimension: int = 512):
        if dimension < 2:
            raise ExtractorError(f"dimension must be >= 2, got {dimension}")
        self.dimension = dimension

    def embed_text(self, prompt: str) -> np.ndarray:
        if not prompt.strip():
            raise ExtractorError("cannot embed an empty prompt")
        rng = _hash_rng(b"text", prompt.encode("utf-8"))
        return _unit(rng.standard_normal(self.dimension))

    def embed_video(self, path: str, frame_count: int) -> np.ndarray:
        try:
            payload = Path(path).read_bytes()
        except OSError as exc:
            raise ExtractorError(f"cannot read video {path!r}: {exc}") from exc
        if len(payload) == 0:
            raise ExtractorError(f"video {path!r} is undecodable (empty file)")
        if len(payload) < frame_count:
            raise ExtractorError(
                f"video {path!r} has too few frames: {len(payload)} byte(s) "
                f"for {frame_count} samples"
            )
        # uniform temporal sampling, then the per-frame embeddings are
        # mean-pooled, mirroring how a frame-aggregating model behaves
        bounds = np.linspace(0, len(payload), frame_count + 1, dtype=int)
        frames = [payload[bounds[i]:bounds[i + 1]] for i in range(frame_count)]
        vectors = [
            _hash_rng(b"frame", frame).standard_normal(self.dimension)
            for frame in frames
        ]
        return _unit(np.mean(vectors, axis=0))


class XClipBackend:
    """Pretrained video-text model via transformers.

    Default checkpoint embeds both modalities into one 512-wide space.
    Inference runs in eval mode under no_grad, frames are sampled
    uniformly, and the model's own frame aggregation produces the clip
    vector.
    """

    DEFAULT_MODEL = "microsoft/xclip-base-patch32"

    def __init__(self, model: str | None = None):
        try:
            import torch
            from transformers import AutoModel, AutoProcessor
        except ImportError as exc:
            raise ExtractorError(
                "backend 'xclip' needs the transformers and torch packages "
                "(pip install 'siteextract[xclip]')"
            ) from exc
        self._torch = torch
        name = model or self.DEFAULT_MODEL
        try:
            self.processor = AutoProcessor.from_pretrained(name)
            self.model = AutoModel.from_pretrained(name).eval()
        except Exception as exc:
            raise ExtractorError(f"cannot load model {name!r}: {exc}") from exc
        self.dimension = int(self.model.config.projection_dim)

    def embed_text(self, prompt: str) -> np.ndarray:
        if not prompt.strip():
            raise ExtractorError("cannot embed an empty prompt")
        inputs = self.processor(text=[prompt], return_tensors="pt", padding=True)
        with self._torch.no_grad():
            features = self.model.get_text_features(**inputs)
        return _unit(features[0].cpu().numpy().astype(np.float64))

    def _sample_frames(self, path: str, frame_count: int):
        try:
            import av
        except ImportError as exc:
            raise ExtractorError("video decoding needs the av package") from exc
        try:
            with av.open(path) as container:
                frames = [f.to_ndarray(format="rgb24") for f in container.decode(video=0)]
        except Exception as exc:
            raise ExtractorError(f"video {path!r} is undecodable: {exc}") from exc
        if len(frames) < frame_count:
            raise ExtractorError(
                f"video {path!r} has too few frames: {len(frames)} for {frame_count}"
            )
        picks = np.linspace(0, len(frames) - 1, frame_count).round().astype(int)
        return [frames[i] for i in picks]

    def embed_video(self, path: str, frame_count: int) -> np.ndarray:
        frames = self._sample_frames(path, frame_count)
        inputs = self.processor(videos=[frames], return_tensors="pt")
        with self._torch.no_grad():
            features = self.model.get_video_features(**inputs)
        return _unit(features[0].cpu().numpy().astype(np.float64))


def get_backend(job):
    """Instantiate the backend a job names."""
    if job.backend == "stub":
        return StubBackend(dimension=job.dimension)
    if job.backend == "xclip":
        return XClipBackend(model=job.model)
    raise ExtractorError(f"unknown backend {job.backend!r}; expected stub or xclip")
