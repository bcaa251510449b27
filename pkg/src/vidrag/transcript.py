"""Aligned video caption transcripts.

A transcript interleaves visual scene captions with speech cues on a shared
timeline. The canonical rendered form is one line per segment:

    [HH:MM:SS.mmm --> HH:MM:SS.mmm] KIND: text

where KIND is VISUAL or SPEECH. Rendering and parsing round-trip exactly,
which is what makes chunk character offsets and citation timestamps reliable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .errors import InvalidParams, MalformedLine

__all__ = [
    "TimeSpan",
    "SceneCaption",
    "SubtitleCue",
    "SegmentKind",
    "AlignedSegment",
    "AlignedTranscript",
    "Chunk",
    "normalize_text",
    "align",
    "render",
    "parse_rendered",
    "chunk_transcript",
    "format_timestamp",
]


@dataclass(frozen=True, order=True)
class TimeSpan:
    """Half-open-ish time interval in integer milliseconds (end >= start >= 0)."""

    start_ms: int
    end_ms: int

    def __post_init__(self):
        if self.start_ms < 0:
            raise InvalidParams(f"start_ms must be >= 0, got {self.start_ms}")
        if self.end_ms < self.start_ms:
            raise InvalidParams(
                f"end_ms ({self.end_ms}) must be >= start_ms ({self.start_ms})"
            )


@dataclass(frozen=True)
class SceneCaption:
    """A machine-generated visual description of one video clip."""

    span: TimeSpan
    text: str


@dataclass(frozen=True)
class SubtitleCue:
    """One subtitle / ASR cue."""

    span: TimeSpan
    text: str


class SegmentKind(str, Enum):
    VISUAL = "VISUAL"
    SPEECH = "SPEECH"


@dataclass(frozen=True)
class AlignedSegment:
    span: TimeSpan
    kind: SegmentKind
    text: str


@dataclass(frozen=True)
class AlignedTranscript:
    video_id: str
    segments: tuple[AlignedSegment, ...]


@dataclass(frozen=True)
class Chunk:
    """A contiguous slice of rendered transcript lines.

    char_span indexes into the rendered transcript; text is exactly that
    substring. time_span covers (min start, max end) of the contained
    segments, so citations built from a chunk carry honest timestamps.
    """

    video_id: str
    chunk_index: int
    char_span: tuple[int, int]
    time_span: TimeSpan
    text: str


_WS_RE = re.compile(r"\s+")


def normalize_text(text: str) -> str:
    """Collapse all whitespace runs (including newlines) to single spaces."""
    return _WS_RE.sub(" ", text).strip()


def align(
    scenes: list[SceneCaption] | tuple[SceneCaption, ...],
    cues: list[SubtitleCue] | tuple[SubtitleCue, ...],
    video_id: str = "",
) -> AlignedTranscript:
    """Interleave scene captions and cues into one time-ordered transcript.

    Ordering key: (start_ms, VISUAL before SPEECH, end_ms), stable with
    respect to each input list. Texts pass through untouched.
    """
    tagged = [
        AlignedSegment(span=s.span, kind=SegmentKind.VISUAL, text=s.text)
        for s in scenes
    ] + [
        AlignedSegment(span=c.span, kind=SegmentKind.SPEECH, text=c.text)
        for c in cues
    ]
    tagged.sort(
        key=lambda seg: (
            seg.span.start_ms,
            0 if seg.kind is SegmentKind.VISUAL else 1,
            seg.span.end_ms,
        )
    )
    return AlignedTranscript(video_id=video_id, segments=tuple(tagged))


def format_timestamp(ms: int) -> str:
    """Milliseconds to HH:MM:SS.mmm (hours grow past two digits if needed)."""
    hours, rest = divmod(ms, 3_600_000)
    minutes, rest = divmod(rest, 60_000)
    seconds, millis = divmod(rest, 1000)
    return f"{hours:02d}:{minutes:02d}:{seconds:02d}.{millis:03d}"


def render(transcript: AlignedTranscript) -> str:
    """Render to the canonical one-line-per-segment text form."""
    return "\n".join(
        f"[{format_timestamp(seg.span.start_ms)} --> {format_timestamp(seg.span.end_ms)}]"
        f" {seg.kind.value}: {seg.text}"
        for seg in transcript.segments
    )


_LINE_RE = re.compile(
    r"^\[(\d{2,}):(\d{2}):(\d{2})\.(\d{3}) --> (\d{2,}):(\d{2}):(\d{2})\.(\d{3})\]"
    r" (VISUAL|SPEECH): (.*)$"
)


def _ts_ms(h: str, m: str, s: str, ms: str) -> int:
    return int(h) * 3_600_000 + int(m) * 60_000 + int(s) * 1000 + int(ms)


def parse_rendered(text: str, video_id: str = "") -> AlignedTranscript:
    """Parse canonical rendered text back into a transcript.

    Inverse of render() for the given video_id; raises MalformedLine with a
    1-based line number on anything that does not match the grammar.
    """
    segments: list[AlignedSegment] = []
    if text == "":
        return AlignedTranscript(video_id=video_id, segments=())
    for line_no, line in enumerate(text.split("\n"), start=1):
        m = _LINE_RE.match(line)
        if not m:
            raise MalformedLine(line_no, line)
        start = _ts_ms(m.group(1), m.group(2), m.group(3), m.group(4))
        end = _ts_ms(m.group(5), m.group(6), m.group(7), m.group(8))
        segments.append(
            AlignedSegment(
                span=TimeSpan(start, end),
                kind=SegmentKind(m.group(9)),
                text=m.group(10),
            )
        )
    return AlignedTranscript(video_id=video_id, segments=tuple(segments))


def chunk_transcript(
    transcript: AlignedTranscript,
    max_chars: int = 2000,
    overlap_lines: int = 2,
) -> list[Chunk]:
    """Greedy line-packing of the rendered transcript.

    Each chunk is a run of whole rendered lines totalling at most max_chars
    (a single line longer than max_chars becomes a chunk by itself), and
    consecutive chunks share overlap_lines lines. When the overlap would
    stall the scan, it is reduced at that boundary so every chunk starts
    strictly after the previous one.
    """
    if max_chars <= 0:
        raise InvalidParams(f"max_chars must be positive, got {max_chars}")
    if overlap_lines < 0:
        raise InvalidParams(f"overlap_lines must be >= 0, got {overlap_lines}")

    rendered = render(transcript)
    if not rendered:
        return []
    lines = rendered.split("\n")
    # offset of each line within the rendered text ("\n"-joined)
    offsets: list[int] = []
    pos = 0
    for line in lines:
        offsets.append(pos)
        pos += len(line) + 1

    chunks: list[Chunk] = []
    start = 0
    n = len(lines)
    while start < n:
        end = start + 1
        total = len(lines[start])
        while end < n and total + 1 + len(lines[end]) <= max_chars:
            total += 1 + len(lines[end])
            end += 1

        segs = transcript.segments[start:end]
        span = TimeSpan(
            min(s.span.start_ms for s in segs),
            max(s.span.end_ms for s in segs),
        )
        char_start = offsets[start]
        char_end = offsets[end - 1] + len(lines[end - 1])
        chunks.append(
            Chunk(
                video_id=transcript.video_id,
                chunk_index=len(chunks),
                char_span=(char_start, char_end),
                time_span=span,
                text=rendered[char_start:char_end],
            )
        )
        if end >= n:
            break
        next_start = end - overlap_lines
        if next_start <= start:
            next_start = start + 1
        start = next_start
    return chunks
