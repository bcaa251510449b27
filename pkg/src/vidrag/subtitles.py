"""SRT and WebVTT subtitle parsing into SubtitleCue lists.

Both decimal separators (SRT's comma, WebVTT's dot) are accepted in either
format, and the hours field is optional in WebVTT. Multi-line payloads are
joined with single spaces and styling tags are stripped, so one cue always
renders as one transcript line.
"""

from __future__ import annotations

import html
import re
from enum import Enum

from .errors import EmptyInput, MalformedTimestamp
from .transcript import SubtitleCue, TimeSpan, normalize_text

__all__ = ["SubtitleFormat", "detect_format", "parse_subtitles"]


class SubtitleFormat(str, Enum):
    SRT = "SRT"
    WEBVTT = "WEBVTT"


_SRT_TIME_RE = re.compile(
    r"^\s*(\d{1,2}):(\d{2}):(\d{2})[,.](\d{1,3})\s*-->\s*"
    r"(\d{1,2}):(\d{2}):(\d{2})[,.](\d{1,3})\s*$"
)
# hours optional; cue settings after the timestamps are ignored
_VTT_TIME_RE = re.compile(
    r"^\s*(?:(\d{1,4}):)?(\d{1,2}):(\d{2})[.,](\d{1,3})\s*-->\s*"
    r"(?:(\d{1,4}):)?(\d{1,2}):(\d{2})[.,](\d{1,3})(?:\s+\S.*)?$"
)
_TAG_RE = re.compile(r"<[^>]*>")


def detect_format(raw: str) -> SubtitleFormat:
    head = raw.lstrip("﻿").lstrip()
    return SubtitleFormat.WEBVTT if head.startswith("WEBVTT") else SubtitleFormat.SRT


def _clean_payload(lines: list[str]) -> str:
    joined = " ".join(lines)
    return normalize_text(html.unescape(_TAG_RE.sub("", joined)))


def _ms(hours: str | None, minutes: str, seconds: str, frac: str) -> int:
    return (
        int(hours or 0) * 3_600_000
        + int(minutes) * 60_000
        + int(seconds) * 1000
        + int(frac.ljust(3, "0"))
    )


def _blocks(lines: list[str]) -> list[list[tuple[int, str]]]:
    """Split numbered lines into blank-separated blocks."""
    blocks: list[list[tuple[int, str]]] = []
    current: list[tuple[int, str]] = []
    for no, line in enumerate(lines, start=1):
        if line.strip():
            current.append((no, line))
        elif current:
            blocks.append(current)
            current = []
    if current:
        blocks.append(current)
    return blocks


def _parse_srt(raw: str) -> list[SubtitleCue]:
    cues: list[SubtitleCue] = []
    for block in _blocks(raw.splitlines()):
        i = 0
        # optional numeric counter line
        if len(block) > 1 and block[0][1].strip().isdigit():
            i = 1
        line_no, line = block[i]
        m = _SRT_TIME_RE.match(line)
        if not m:
            raise MalformedTimestamp(line_no, line.strip())
        start = _ms(m.group(1), m.group(2), m.group(3), m.group(4))
        end = _ms(m.group(5), m.group(6), m.group(7), m.group(8))
        text = _clean_payload([l for _, l in block[i + 1:]])
        if text:
            cues.append(SubtitleCue(span=TimeSpan(start, max(start, end)), text=text))
    return cues


def _parse_vtt(raw: str) -> list[SubtitleCue]:
    lines = raw.splitlines()
    blocks = _blocks(lines)
    cues: list[SubtitleCue] = []
    for bi, block in enumerate(blocks):
        first = block[0][1].lstrip("﻿").strip()
        if bi == 0 and first.startswith("WEBVTT"):
            continue
        if first.startswith(("NOTE", "STYLE", "REGION")):
            continue
        # optional cue identifier line before the timing line
        i = 0
        if "-->" not in block[0][1] and len(block) > 1 and "-->" in block[1][1]:
            i = 1
        line_no, line = block[i]
        if "-->" not in line:
            continue  # stray metadata block
        m = _VTT_TIME_RE.match(line)
        if not m:
            raise MalformedTimestamp(line_no, line.strip())
        start = _ms(m.group(1), m.group(2), m.group(3), m.group(4))
        end = _ms(m.group(5), m.group(6), m.group(7), m.group(8))
        text = _clean_payload([l for _, l in block[i + 1:]])
        if text:
            cues.append(SubtitleCue(span=TimeSpan(start, max(start, end)), text=text))
    return cues


def parse_subtitles(raw: str, format: SubtitleFormat | None = None) -> list[SubtitleCue]:
    """Parse subtitle text into cues sorted by (start_ms, end_ms).

    format=None auto-detects: files beginning with "WEBVTT" parse as WebVTT,
    anything else as SRT. Raises MalformedTimestamp (with line number) on a
    bad timing line and EmptyInput when no non-empty cues are found.
    """
    if format is None:
        format = detect_format(raw)
    raw = raw.lstrip("﻿")
    if format is SubtitleFormat.WEBVTT:
        cues = _parse_vtt(raw)
    else:
        cues = _parse_srt(raw)
    if not cues:
        raise EmptyInput(f"no cues found in {format.value} input")
    cues.sort(key=lambda c: (c.span.start_ms, c.span.end_ms))
    return cues
