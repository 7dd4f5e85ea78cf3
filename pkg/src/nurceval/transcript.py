"""Parsing of NURC-convention transcripts into utterance units.

A transcript is one utterance unit per line, optionally prefixed by a speaker
label and a tab (``L1:<TAB>text``).  Each unit is scanned for annotation marks:

=================  ==========================================
``((risos))``      comment (annotator metadata)
``( )``            incomprehension of words or segments
``(texto)``        hypothesis of what was heard
``[``              overlapping voices, to ``]`` or end of unit
``::``             vowel lengthening
``...``            pause
=================  ==========================================

Offsets in :class:`AnnotationSpan` are code point offsets into ``raw``, so
``raw[span.start:span.end]`` is the marked text.
"""

from __future__ import annotations

import enum
import json
import re
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence

from .exceptions import EmptyFile, MalformedManifest, UnbalancedDelimiterWarning


class SpanKind(str, enum.Enum):
    COMMENT = "comment"
    INCOMPREHENSION = "incomprehension"
    HYPOTHESIS = "hypothesis"
    OVERLAP = "overlap"
    LENGTHENING = "lengthening"
    PAUSE = "pause"


class Genre(str, enum.Enum):
    EF = "EF"
    DID = "DID"
    D2 = "D2"


class Quality(str, enum.Enum):
    GOOD = "Good"
    BAD = "Bad"
    MIXED = "Mixed"

    @classmethod
    def parse(cls, value: str) -> "Quality":
        key = value.strip().lower()
        aliases = {"+": cls.GOOD, "good": cls.GOOD, "-": cls.BAD, "bad": cls.BAD, "mixed": cls.MIXED}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown audio quality class {value!r}") from None


@dataclass(frozen=True)
class AnnotationSpan:
    kind: SpanKind
    start: int
    end: int

    def text(self, raw: str) -> str:
        return raw[self.start : self.end]


@dataclass(frozen=True)
class Diagnostic:
    code: str  # "unbalanced" | "unknown_mark" | "stray_close"
    position: int
    detail: str


class PhenomenonFlags(NamedTuple):
    incomprehension: bool = False
    hypothesis: bool = False
    overlap: bool = False

    @classmethod
    def from_spans(cls, spans: Iterable[AnnotationSpan]) -> "PhenomenonFlags":
        kinds = {s.kind for s in spans}
        return cls(
            incomprehension=SpanKind.INCOMPREHENSION in kinds,
            hypothesis=SpanKind.HYPOTHESIS in kinds,
            overlap=SpanKind.OVERLAP in kinds,
        )

    @property
    def any(self) -> bool:
        return self.incomprehension or self.hypothesis or self.overlap


class PhenomenonCounts(NamedTuple):
    overlap: int = 0
    incomprehension: int = 0
    hypothesis: int = 0

    def __add__(self, other):  # type: ignore[override]
        return PhenomenonCounts(*(a + b for a, b in zip(self, other)))


# Punctuation the NURC conventions or ordinary orthography use; anything else
# that is neither a letter, digit nor whitespace is reported as unknown.
_KNOWN_PUNCT = set(",.;:?!\"'“”‘’«»-–—ºª…()[]")


def _comment_end(raw: str, start: int) -> tuple[int, bool]:
    """End offset of the ``((...))`` comment opening at ``start``."""
    depth = 0
    i = start + 2
    n = len(raw)
    while i < n:
        if depth == 0 and raw.startswith("))", i):
            return i + 2, True
        ch = raw[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth = max(0, depth - 1)
        i += 1
    return n, False


def scan(raw: str) -> tuple[list[AnnotationSpan], list[Diagnostic]]:
    """Return the annotation spans of one unit and any diagnostics found."""
    spans: list[AnnotationSpan] = []
    diags: list[Diagnostic] = []
    overlap_start: Optional[int] = None
    n = len(raw)
    i = 0
    while i < n:
        ch = raw[i]
        if raw.startswith("((", i):
            end, closed = _comment_end(raw, i)
            if not closed:
                diags.append(Diagnostic("unbalanced", i, "'((' without '))'"))
            spans.append(AnnotationSpan(SpanKind.COMMENT, i, end))
            i = end
        elif ch == "(":
            close = raw.find(")", i + 1)
            if close == -1:
                diags.append(Diagnostic("unbalanced", i, "'(' without ')'"))
                end = n
            else:
                end = close + 1
            inner = raw[i + 1 : close if close != -1 else n]
            kind = SpanKind.HYPOTHESIS if inner.strip() else SpanKind.INCOMPREHENSION
            spans.append(AnnotationSpan(kind, i, end))
            i = end
        elif ch == "[":
            if overlap_start is None:
                overlap_start = i
            i += 1
        elif ch == "]":
            if overlap_start is None:
                diags.append(Diagnostic("stray_close", i, "']' without '['"))
            else:
                spans.append(AnnotationSpan(SpanKind.OVERLAP, overlap_start, i + 1))
                overlap_start = None
            i += 1
        elif raw.startswith("::", i):
            j = i
            while j < n and raw[j] == ":":
                j += 1
            spans.append(AnnotationSpan(SpanKind.LENGTHENING, i, j))
            i = j
        elif raw.startswith("...", i):
            j = i
            while j < n and raw[j] == ".":
                j += 1
            spans.append(AnnotationSpan(SpanKind.PAUSE, i, j))
            i = j
        elif ch == "…":
            spans.append(AnnotationSpan(SpanKind.PAUSE, i, i + 1))
            i += 1
        else:
            if ch == ")":
                diags.append(Diagnostic("stray_close", i, "')' without '('"))
            elif not (ch.isalnum() or ch.isspace() or ch in _KNOWN_PUNCT):
                diags.append(Diagnostic("unknown_mark", i, ch))
            i += 1
    if overlap_start is not None:
        # the convention seldom closes '[': overlap runs to end of unit
        spans.append(AnnotationSpan(SpanKind.OVERLAP, overlap_start, n))
    spans.sort(key=lambda s: (s.start, -s.end))
    return spans, diags


def detect_spans(raw: str) -> list[AnnotationSpan]:
    """Annotation spans of a single unit, in order of start offset.

    Unbalanced ``(`` or ``((`` raise an :class:`UnbalancedDelimiterWarning`;
    the span is then taken to run to the end of the unit.
    """
    spans, diags = scan(raw)
    for d in diags:
        if d.code == "unbalanced":
            warnings.warn(f"{d.detail} at offset {d.position} in {raw!r}", UnbalancedDelimiterWarning, stacklevel=2)
    return spans


@dataclass(frozen=True)
class UtteranceUnit:
    index: int
    raw: str
    speaker: str = ""
    spans: tuple[AnnotationSpan, ...] = ()
    flags: PhenomenonFlags = PhenomenonFlags()
    diagnostics: tuple[Diagnostic, ...] = ()
    id: str = ""
    start_time: Optional[float] = None
    end_time: Optional[float] = None

    @classmethod
    def from_text(cls, raw: str, index: int = 1, speaker: str = "", unit_id: Optional[str] = None, **times):
        spans, diags = scan(raw)
        return cls(
            index=index,
            raw=raw,
            speaker=speaker,
            spans=tuple(spans),
            flags=PhenomenonFlags.from_spans(spans),
            diagnostics=tuple(diags),
            id=unit_id if unit_id is not None else str(index),
            **times,
        )

    @property
    def line(self) -> str:
        """The unit rendered back in the plain-text transcript format."""
        return f"{self.speaker}:\t{self.raw}" if self.speaker else self.raw

    def span_counts(self) -> PhenomenonCounts:
        kinds = [s.kind for s in self.spans]
        return PhenomenonCounts(
            overlap=kinds.count(SpanKind.OVERLAP),
            incomprehension=kinds.count(SpanKind.INCOMPREHENSION),
            hypothesis=kinds.count(SpanKind.HYPOTHESIS),
        )


@dataclass(frozen=True)
class InquiryMeta:
    """One manifest row."""

    id: str
    genre: Genre
    quality: Quality
    duration: int
    transcript: Optional[Path] = None

    @classmethod
    def coerce(cls, id: str, meta) -> "InquiryMeta":
        if isinstance(meta, InquiryMeta):
            return meta
        if not isinstance(meta, Mapping):
            raise MalformedManifest(f"{id}: manifest entry must be a mapping")
        missing = [k for k in ("genre", "quality", "duration") if meta.get(k) in (None, "")]
        if missing:
            raise MalformedManifest(f"{id}: missing {', '.join(missing)}")
        try:
            genre = Genre(str(meta["genre"]).strip().upper())
            quality = meta["quality"] if isinstance(meta["quality"], Quality) else Quality.parse(str(meta["quality"]))
            duration = parse_duration(meta["duration"])
        except ValueError as exc:
            raise MalformedManifest(f"{id}: {exc}") from None
        path = meta.get("transcript") or meta.get("transcript-path")
        return cls(id, genre, quality, duration, Path(path) if path else None)


@dataclass(frozen=True)
class Inquiry:
    id: str
    genre: Genre
    quality: Quality
    duration: int
    units: tuple[UtteranceUnit, ...] = field(default_factory=tuple)

    def unit(self, unit_id: str) -> UtteranceUnit:
        for u in self.units:
            if u.id == unit_id:
                return u
        raise KeyError(unit_id)


_DURATION_RE = re.compile(r"^(\d+):([0-5]?\d):([0-5]?\d)$")


def parse_duration(value) -> int:
    """``H:MM:SS`` (or a plain number of seconds) to whole seconds."""
    if isinstance(value, int) and not isinstance(value, bool):
        if value < 0:
            raise ValueError("duration must be non-negative")
        return value
    text = str(value).strip()
    if text.isdigit():
        return int(text)
    m = _DURATION_RE.match(text)
    if not m:
        raise ValueError(f"bad duration {value!r}, expected H:MM:SS")
    h, mi, s = map(int, m.groups())
    return h * 3600 + mi * 60 + s


def format_duration(seconds: int) -> str:
    return f"{seconds // 3600}:{seconds % 3600 // 60:02d}:{seconds % 60:02d}"


_SPEAKER_RE = re.compile(r"^(?P<speaker>[^\t:]{1,40}):\t(?P<text>.*)$", re.S)


def parse_inquiry(text: str, id: str, meta) -> Inquiry:
    """Parse a plain-text transcript into an :class:`Inquiry`.

    Blank lines are skipped; every other line becomes one unit whose raw text
    is kept exactly as written (minus the optional ``SPEAKER:<TAB>`` prefix).
    """
    info = InquiryMeta.coerce(id, meta)
    units = []
    for line in text.split("\n"):
        line = line[:-1] if line.endswith("\r") else line
        if not line.strip():
            continue
        speaker = ""
        m = _SPEAKER_RE.match(line)
        if m:
            speaker, line = m.group("speaker"), m.group("text")
        units.append(UtteranceUnit.from_text(line, index=len(units) + 1, speaker=speaker))
    if not units:
        raise EmptyFile(f"{id}: transcript has no non-blank lines")
    return Inquiry(info.id if info.id else id, info.genre, info.quality, info.duration, tuple(units))


def parse_inquiry_records(records: Sequence[Mapping], id: str, meta) -> Inquiry:
    """Build an :class:`Inquiry` from structured records.

    Each record needs ``text`` and may carry ``speaker``, ``id``, ``start`` and
    ``end`` (seconds).
    """
    info = InquiryMeta.coerce(id, meta)
    units = []
    seen = set()
    for rec in records:
        raw = rec.get("text")
        if not isinstance(raw, str):
            raise MalformedManifest(f"{id}: record without a 'text' string: {rec!r}")
        if not raw.strip():
            continue
        index = len(units) + 1
        unit_id = str(rec.get("id", index))
        if unit_id in seen:
            raise MalformedManifest(f"{id}: duplicate unit id {unit_id!r}")
        seen.add(unit_id)
        units.append(
            UtteranceUnit.from_text(
                raw,
                index=index,
                speaker=str(rec.get("speaker", "") or ""),
                unit_id=unit_id,
                start_time=rec.get("start"),
                end_time=rec.get("end"),
            )
        )
    if not units:
        raise EmptyFile(f"{id}: transcript has no non-blank units")
    return Inquiry(info.id, info.genre, info.quality, info.duration, tuple(units))


def read_inquiry(path, meta: InquiryMeta) -> Inquiry:
    """Load a transcript file; ``.jsonl`` files are read as structured records."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".jsonl":
        records = []
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise MalformedManifest(f"{path}:{lineno}: {exc}") from None
        return parse_inquiry_records(records, meta.id, meta)
    return parse_inquiry(text, meta.id, meta)


def count_phenomena(inquiry: Inquiry) -> PhenomenonCounts:
    """Total (overlap, incomprehension, hypothesis) spans across all units."""
    total = PhenomenonCounts()
    for unit in inquiry.units:
        total = total + unit.span_counts()
    return total
