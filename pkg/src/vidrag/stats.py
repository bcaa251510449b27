"""Catalog-level statistics in the shape of the dataset summary table."""

from __future__ import annotations

from dataclasses import dataclass

from .catalog import FieldVariant, VideoDocument, variant_text
from .errors import EmptyCatalog

__all__ = ["FieldLengthStats", "CorpusStats", "corpus_stats", "render_stats_table"]

# (stats key, human label) in presentation order
STAT_FIELDS = [
    ("title", "Title"),
    ("description", "Description"),
    ("title_description", "Title + Description"),
    ("visual_captions", "Visual Video Captions"),
    ("subtitles", "Subtitles / ASR"),
    ("aligned_transcript", "Aligned Captions"),
]


@dataclass(frozen=True)
class FieldLengthStats:
    total: int
    median: int


@dataclass(frozen=True)
class CorpusStats:
    video_count: int
    scene_count: int
    median_scene_count: int
    total_duration_s: int
    median_duration_s: int
    field_lengths: dict[str, FieldLengthStats]


def lower_median(values: list[int]) -> int:
    """Median of a non-empty list; the lower of the two middles for even n."""
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def _field_text(doc: VideoDocument, key: str) -> str:
    if key == "title":
        return doc.title
    if key == "description":
        return doc.description
    if key == "title_description":
        return variant_text(doc, FieldVariant.TITLE_DESCRIPTION)
    if key == "visual_captions":
        return variant_text(doc, FieldVariant.VISUAL_CAPTIONS)
    if key == "subtitles":
        return variant_text(doc, FieldVariant.ASR)
    if key == "aligned_transcript":
        return variant_text(doc, FieldVariant.ALIGNED_TRANSCRIPT)
    raise ValueError(f"unknown stats field {key!r}")


def video_duration_s(doc: VideoDocument) -> int:
    """Max end over all scenes and cues, floored to whole seconds."""
    ends = [s.span.end_ms for s in doc.scenes] + [c.span.end_ms for c in doc.cues]
    return max(ends) // 1000 if ends else 0


def corpus_stats(catalog: list[VideoDocument]) -> CorpusStats:
    if not catalog:
        raise EmptyCatalog("catalog contains no videos")

    durations = [video_duration_s(doc) for doc in catalog]
    scene_counts = [len(doc.scenes) for doc in catalog]

    field_lengths: dict[str, FieldLengthStats] = {}
    for key, _label in STAT_FIELDS:
        lengths = [len(_field_text(doc, key)) for doc in catalog]
        field_lengths[key] = FieldLengthStats(
            total=sum(lengths), median=lower_median(lengths)
        )

    return CorpusStats(
        video_count=len(catalog),
        scene_count=sum(scene_counts),
        median_scene_count=lower_median(scene_counts),
        total_duration_s=sum(durations),
        median_duration_s=lower_median(durations),
        field_lengths=field_lengths,
    )


def stats_as_dict(stats: CorpusStats) -> dict:
    """JSON-friendly view with a stable key order."""
    return {
        "video_count": stats.video_count,
        "scene_count": stats.scene_count,
        "median_scene_count": stats.median_scene_count,
        "total_duration_s": stats.total_duration_s,
        "median_duration_s": stats.median_duration_s,
        "field_lengths": {
            key: {"total": fl.total, "median": fl.median}
            for key, fl in ((k, stats.field_lengths[k]) for k, _ in STAT_FIELDS)
        },
    }


def render_stats_table(stats: CorpusStats) -> str:
    rows = [
        ("Video Count", f"{stats.video_count:,}", "-"),
        ("Scene Count", f"{stats.scene_count:,}", f"{stats.median_scene_count:.2f}"),
        (
            "Video Duration (seconds)",
            f"{stats.total_duration_s:,}",
            f"{stats.median_duration_s:.2f}",
        ),
    ] + [
        (
            label,
            f"{stats.field_lengths[key].total:,}",
            f"{stats.field_lengths[key].median:.2f}",
        )
        for key, label in STAT_FIELDS
    ]
    header = ("DATASET DIMENSION", "TOTAL", "MEDIAN")
    widths = [
        max(len(header[i]), *(len(r[i]) for r in rows)) for i in range(3)
    ]
    lines = [
        "  ".join(header[i].ljust(widths[i]) for i in range(3)).rstrip(),
        "  ".join("-" * widths[i] for i in range(3)),
    ]
    for row in rows:
        lines.append("  ".join(row[i].ljust(widths[i]) for i in range(3)).rstrip())
    return "\n".join(lines)
