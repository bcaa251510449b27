"""Video catalog ingestion and per-video field text extraction.

Catalog files are UTF-8 JSON lines, one video per line:

    {"video_id": "...", "title": "...", "description": "...", "url": "...",
     "scenes": [{"start_ms": 0, "end_ms": 4200, "text": "..."}, ...],
     "cues":   [{"start_ms": ..., "end_ms": ..., "text": "..."}, ...]}

video_id is required and must be unique; everything else is optional.
Scene/cue texts are whitespace-normalized at parse time and empty ones are
dropped, so downstream transcripts always render one segment per line.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import DuplicateVideoId, SchemaError
from .transcript import (
    AlignedTranscript,
    SceneCaption,
    SubtitleCue,
    TimeSpan,
    align,
    normalize_text,
    render,
)

__all__ = [
    "VideoDocument",
    "FieldVariant",
    "parse_catalog",
    "load_catalog",
    "variant_text",
]


@dataclass(frozen=True)
class VideoDocument:
    """One catalog entry; scenes and cues are kept sorted by (start, end)."""

    video_id: str
    title: str = ""
    description: str = ""
    url: str = ""
    scenes: tuple[SceneCaption, ...] = field(default_factory=tuple)
    cues: tuple[SubtitleCue, ...] = field(default_factory=tuple)

    def aligned(self) -> AlignedTranscript:
        return align(list(self.scenes), list(self.cues), video_id=self.video_id)


class FieldVariant(str, Enum):
    """Which per-video text gets embedded and indexed."""

    ASR = "asr"
    VISUAL_CAPTIONS = "visual_captions"
    TITLE = "title"
    TITLE_DESCRIPTION = "title_description"
    ALIGNED_TRANSCRIPT = "aligned_transcript"


def _require_str(obj: dict, key: str, line_no: int, default: str | None = None) -> str:
    if key not in obj:
        if default is not None:
            return default
        raise SchemaError(line_no, f"missing required field {key!r}", field=key)
    value = obj[key]
    if not isinstance(value, str):
        raise SchemaError(line_no, f"field {key!r} must be a string", field=key)
    return value


def _require_ms(obj: dict, key: str, line_no: int, where: str) -> int:
    if key not in obj:
        raise SchemaError(line_no, f"{where} missing required field {key!r}", field=key)
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(line_no, f"{where} field {key!r} must be a number", field=key)
    if isinstance(value, float):
        if not value.is_integer():
            raise SchemaError(
                line_no, f"{where} field {key!r} must be integer milliseconds", field=key
            )
        value = int(value)
    return value


def _parse_spans(raw_items, line_no: int, key: str) -> list[tuple[TimeSpan, str]]:
    if not isinstance(raw_items, list):
        raise SchemaError(line_no, f"field {key!r} must be an array", field=key)
    items: list[tuple[TimeSpan, str]] = []
    for item in raw_items:
        if not isinstance(item, dict):
            raise SchemaError(line_no, f"{key} entries must be objects", field=key)
        start = _require_ms(item, "start_ms", line_no, key)
        end = _require_ms(item, "end_ms", line_no, key)
        if start < 0 or end < start:
            raise SchemaError(
                line_no, f"{key} span [{start}, {end}] is not a valid time span", field=key
            )
        text = normalize_text(_require_str(item, "text", line_no))
        if text:
            items.append((TimeSpan(start, end), text))
    items.sort(key=lambda pair: (pair[0].start_ms, pair[0].end_ms))
    return items


def parse_catalog(raw: str) -> list[VideoDocument]:
    """Parse a JSON-lines catalog; rejects duplicate ids and bad records."""
    documents: list[VideoDocument] = []
    seen: dict[str, int] = {}
    for line_no, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(line_no, f"invalid JSON: {exc.msg}") from exc
        if not isinstance(obj, dict):
            raise SchemaError(line_no, "record must be a JSON object")
        video_id = _require_str(obj, "video_id", line_no)
        if not video_id:
            raise SchemaError(line_no, "video_id must be non-empty", field="video_id")
        if video_id in seen:
            raise DuplicateVideoId(video_id, line_no)
        seen[video_id] = line_no
        scenes = _parse_spans(obj.get("scenes", []), line_no, "scenes")
        cues = _parse_spans(obj.get("cues", []), line_no, "cues")
        documents.append(
            VideoDocument(
                video_id=video_id,
                title=_require_str(obj, "title", line_no, default=""),
                description=_require_str(obj, "description", line_no, default=""),
                url=_require_str(obj, "url", line_no, default=""),
                scenes=tuple(SceneCaption(span, text) for span, text in scenes),
                cues=tuple(SubtitleCue(span, text) for span, text in cues),
            )
        )
    return documents


def load_catalog(path: str | Path) -> list[VideoDocument]:
    return parse_catalog(Path(path).read_text(encoding="utf-8"))


def variant_text(doc: VideoDocument, variant: FieldVariant) -> str:
    """The text a field variant contributes for one video.

    Definitions match the corpus statistics: ASR and visual captions are the
    cue/scene texts joined by newlines, title+description joins with one
    newline, and the aligned transcript is the canonical rendered form.
    """
    if variant is FieldVariant.ASR:
        return "\n".join(c.text for c in doc.cues)
    if variant is FieldVariant.VISUAL_CAPTIONS:
        return "\n".join(s.text for s in doc.scenes)
    if variant is FieldVariant.TITLE:
        return doc.title
    if variant is FieldVariant.TITLE_DESCRIPTION:
        return doc.title + "\n" + doc.description
    if variant is FieldVariant.ALIGNED_TRANSCRIPT:
        return render(doc.aligned())
    raise ValueError(f"unknown variant {variant!r}")
