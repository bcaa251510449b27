"""Exact cosine top-K vector store with binary persistence.

A flat full-scan index: at the paper's corpus scale (tens of thousands of
videos, low millions of chunks) exact search stays tractable and keeps
recall out of the picture, so retrieval differences come only from the
embedding and field variant under test. Ties break by ascending entry_id
for cross-run determinism.

On-disk format (all integers little-endian):

    magic "VRIX" | u32 version=1 | u32 dim | u8 flags | u64 entry count
    per entry: u16 id_len, id | u32 video_id_len, video_id
               u64 start_ms, u64 end_ms | dim x f32 vector

A JSON sidecar at <path>.json records the provider spec, field variant and
chunking parameters used at build time.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .catalog import FieldVariant, VideoDocument, variant_text
from .embedding import EmbeddingProvider
from .errors import CorruptIndex, DimensionMismatch, EmptyIndex, NoIndexableText
from .transcript import TimeSpan, chunk_transcript

__all__ = [
    "IndexEntry",
    "RetrievalResult",
    "VectorIndex",
    "ChunkingParams",
    "build_index",
    "save_index",
    "load_index",
]

_MAGIC = b"VRIX"
_VERSION = 1


@dataclass(frozen=True)
class IndexEntry:
    entry_id: str
    video_id: str
    time_span: TimeSpan
    vector: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, IndexEntry):
            return NotImplemented
        return (
            self.entry_id == other.entry_id
            and self.video_id == other.video_id
            and self.time_span == other.time_span
            and self.vector.tobytes() == other.vector.tobytes()
        )


@dataclass(frozen=True)
class RetrievalResult:
    rank: int  # 1-based
    entry_id: str
    video_id: str
    score: float
    time_span: TimeSpan


@dataclass(frozen=True)
class ChunkingParams:
    max_chars: int = 2000
    overlap_lines: int = 2

    def as_dict(self) -> dict:
        return {"max_chars": self.max_chars, "overlap_lines": self.overlap_lines}


class VectorIndex:
    """Immutable after construction; concurrent searches are safe."""

    def __init__(
        self,
        dim: int,
        entries: list[IndexEntry],
        metadata: dict | None = None,
    ):
        for entry in entries:
            if entry.vector.shape != (dim,):
                raise DimensionMismatch(
                    f"entry {entry.entry_id!r} has dim {entry.vector.shape}, index dim {dim}"
                )
        ids = [e.entry_id for e in entries]
        if len(set(ids)) != len(ids):
            raise ValueError("entry_id values must be unique within an index")
        self.dim = dim
        self.entries = list(entries)
        self.metadata = dict(metadata or {})
        if entries:
            self._matrix = np.stack([e.vector for e in entries]).astype(np.float32)
        else:
            self._matrix = np.zeros((0, dim), dtype=np.float32)
        m64 = self._matrix.astype(np.float64)
        self._m64 = m64
        self._norms = np.linalg.norm(m64, axis=1)

    def __len__(self) -> int:
        return len(self.entries)

    def __eq__(self, other):
        if not isinstance(other, VectorIndex):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.metadata == other.metadata
            and self.entries == other.entries
        )

    def search(
        self,
        query_vector: np.ndarray,
        k: int,
        dedup_by_video: bool = False,
        video_filter: set[str] | None = None,
    ) -> list[RetrievalResult]:
        """Exact top-k by cosine over a full scan.

        Ordered by (score desc, entry_id asc). With dedup_by_video only each
        video's best entry appears and k counts videos. video_filter, when
        given, restricts the scan to those video_ids.
        """
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        query = np.asarray(query_vector)
        if query.shape != (self.dim,):
            raise DimensionMismatch(
                f"query dim {query.shape} does not match index dim {self.dim}"
            )
        candidates = [
            i
            for i, entry in enumerate(self.entries)
            if video_filter is None or entry.video_id in video_filter
        ]
        if not candidates:
            raise EmptyIndex("no entries to search")

        q64 = query.astype(np.float64)
        qnorm = float(np.linalg.norm(q64))
        sims = self._m64[candidates] @ q64
        scores = np.zeros(len(candidates), dtype=np.float64)
        norms = self._norms[candidates]
        nonzero = (norms > 0.0) & (qnorm > 0.0)
        scores[nonzero] = sims[nonzero] / (norms[nonzero] * qnorm)
        scores = np.clip(scores, -1.0, 1.0)

        order = sorted(
            range(len(candidates)),
            key=lambda j: (-scores[j], self.entries[candidates[j]].entry_id),
        )
        results: list[RetrievalResult] = []
        seen_videos: set[str] = set()
        for j in order:
            entry = self.entries[candidates[j]]
            if dedup_by_video:
                if entry.video_id in seen_videos:
                    continue
                seen_videos.add(entry.video_id)
            results.append(
                RetrievalResult(
                    rank=len(results) + 1,
                    entry_id=entry.entry_id,
                    video_id=entry.video_id,
                    score=float(scores[j]),
                    time_span=entry.time_span,
                )
            )
            if len(results) == k:
                break
        return results


def build_index(
    catalog: list[VideoDocument],
    variant: FieldVariant,
    provider: EmbeddingProvider,
    chunking: ChunkingParams | None = None,
) -> VectorIndex:
    """Embed one catalog field variant into a searchable index.

    ALIGNED_TRANSCRIPT is chunked (entry ids "video_id#chunk_index" carrying
    the chunk time span); the other variants are short enough to index as a
    single zero-span entry per video. Videos whose variant text is empty are
    skipped and reported in metadata["skipped_video_ids"].
    """
    chunking = chunking or ChunkingParams()
    texts: list[str] = []
    keys: list[tuple[str, str, TimeSpan]] = []  # (entry_id, video_id, span)
    skipped: list[str] = []
    for doc in catalog:
        text = variant_text(doc, variant)
        if not text.strip():
            skipped.append(doc.video_id)
            continue
        if variant is FieldVariant.ALIGNED_TRANSCRIPT:
            for chunk in chunk_transcript(
                doc.aligned(), chunking.max_chars, chunking.overlap_lines
            ):
                texts.append(chunk.text)
                keys.append(
                    (f"{doc.video_id}#{chunk.chunk_index}", doc.video_id, chunk.time_span)
                )
        else:
            texts.append(text)
            keys.append((doc.video_id, doc.video_id, TimeSpan(0, 0)))
    if not texts:
        raise NoIndexableText(f"every video has empty text for variant {variant.value}")

    vectors = provider.embed_batch(texts)
    entries = [
        IndexEntry(entry_id=eid, video_id=vid, time_span=span, vector=vec)
        for (eid, vid, span), vec in zip(keys, vectors)
    ]
    metadata = {
        "provider": provider.spec.as_dict(),
        "variant": variant.value,
        "chunking": chunking.as_dict(),
        "skipped_video_ids": skipped,
    }
    return VectorIndex(dim=provider.dim, entries=entries, metadata=metadata)


def save_index(index: VectorIndex, path: str | Path) -> None:
    path = Path(path)
    with path.open("wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<IIBQ", _VERSION, index.dim, 0, len(index.entries)))
        for entry in index.entries:
            id_bytes = entry.entry_id.encode("utf-8")
            vid_bytes = entry.video_id.encode("utf-8")
            fh.write(struct.pack("<H", len(id_bytes)))
            fh.write(id_bytes)
            fh.write(struct.pack("<I", len(vid_bytes)))
            fh.write(vid_bytes)
            fh.write(struct.pack("<QQ", entry.time_span.start_ms, entry.time_span.end_ms))
            fh.write(entry.vector.astype("<f4").tobytes())
    sidecar = path.with_name(path.name + ".json")
    sidecar.write_text(
        json.dumps(index.metadata, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _read_exact(fh, n: int) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise CorruptIndex(f"truncated index file: wanted {n} bytes, got {len(data)}")
    return data


def load_index(path: str | Path) -> VectorIndex:
    path = Path(path)
    with path.open("rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise CorruptIndex(f"bad magic bytes {magic!r}")
        version, dim, _flags, count = struct.unpack("<IIBQ", _read_exact(fh, 17))
        if version != _VERSION:
            raise CorruptIndex(f"unsupported index version {version}")
        entries: list[IndexEntry] = []
        for _ in range(count):
            (id_len,) = struct.unpack("<H", _read_exact(fh, 2))
            entry_id = _read_exact(fh, id_len).decode("utf-8")
            (vid_len,) = struct.unpack("<I", _read_exact(fh, 4))
            video_id = _read_exact(fh, vid_len).decode("utf-8")
            start_ms, end_ms = struct.unpack("<QQ", _read_exact(fh, 16))
            vector = np.frombuffer(_read_exact(fh, 4 * dim), dtype="<f4").copy()
            entries.append(
                IndexEntry(
                    entry_id=entry_id,
                    video_id=video_id,
                    time_span=TimeSpan(start_ms, end_ms),
                    vector=vector,
                )
            )
        if fh.read(1):
            raise CorruptIndex("trailing bytes after declared entries")
    sidecar = path.with_name(path.name + ".json")
    metadata = {}
    if sidecar.exists():
        metadata = json.loads(sidecar.read_text(encoding="utf-8"))
    return VectorIndex(dim=dim, entries=entries, metadata=metadata)
