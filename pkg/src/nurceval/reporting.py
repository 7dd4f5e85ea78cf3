"""Aggregation of score records into grouped summaries, and their persistence.

Machine outputs always use a decimal point and three decimal places; the
human-readable table can use the Portuguese decimal comma instead.
"""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

from .ablation import cases_for
from .exceptions import InvariantViolation, IoFailure, UnknownInquiryInRecords
from .metrics import ScoreRecord, Totals, make_record
from .transcript import InquiryMeta, PhenomenonCounts, PhenomenonFlags

GROUPINGS = ("inquiry", "genre", "quality", "case", "run", "all")


class Band(str, enum.Enum):
    EASY = "Easy"  # [0, 0.3): few errors, easy to correct by hand
    MODERATE = "Moderate"  # [0.3, 0.8)
    HARD = "Hard"  # [0.8, inf)


def wer_band(value) -> Band:
    """Band of a WER value or of a summary's pooled WER."""
    wer = value.pooled_wer if isinstance(value, ReportSummary) else value
    if wer is None:
        raise ValueError("no WER available for banding")
    if wer < 0:
        raise ValueError(f"negative WER {wer}")
    if wer < 0.3:
        return Band.EASY
    if wer < 0.8:
        return Band.MODERATE
    return Band.HARD


@dataclass(frozen=True)
class ReportSummary:
    group: str
    key: str
    totals: Totals = field(default_factory=Totals)
    ignored: int = 0
    phenomena: PhenomenonCounts = PhenomenonCounts()
    rank: Optional[int] = None

    pooled_wer = property(lambda self: self.totals.pooled_wer)
    macro_wer = property(lambda self: self.totals.macro_wer)
    pooled_cer = property(lambda self: self.totals.pooled_cer)
    macro_cer = property(lambda self: self.totals.macro_cer)

    @property
    def band(self) -> Optional[Band]:
        return None if self.pooled_wer is None else wer_band(self.pooled_wer)

    def merge(self, other: "ReportSummary", group: str = "all", key: str = "all") -> "ReportSummary":
        return ReportSummary(group, key, self.totals + other.totals, self.ignored + other.ignored, self.phenomena + other.phenomena)


def merge_all(summaries: Iterable[ReportSummary], group: str = "all", key: str = "all") -> ReportSummary:
    out = ReportSummary(group, key)
    for s in summaries:
        out = out.merge(s, group, key)
    return out


def _normalize_grouping(grouping: Union[str, Sequence[str]]) -> tuple[str, ...]:
    fields = (grouping,) if isinstance(grouping, str) else tuple(grouping)
    if not fields:
        raise ValueError("empty grouping")
    for f in fields:
        if f not in GROUPINGS:
            raise ValueError(f"unknown grouping {f!r}; choose from {GROUPINGS}")
    return fields


def _manifest_index(manifest) -> dict[str, InquiryMeta]:
    if isinstance(manifest, Mapping):
        return dict(manifest)
    return {m.id: m for m in manifest}


def _keys_for(meta: InquiryMeta, field_name: str, run: str, cases) -> list[str]:
    if field_name == "inquiry":
        return [meta.id]
    if field_name == "genre":
        return [meta.genre.value]
    if field_name == "quality":
        return [meta.quality.value]
    if field_name == "run":
        return [run]
    if field_name == "case":
        return [c.value for c in cases]
    return ["all"]


def aggregate(
    records: Iterable[ScoreRecord],
    manifest,
    grouping: Union[str, Sequence[str]] = "inquiry",
    ignored: Optional[Mapping[str, int]] = None,
) -> list[ReportSummary]:
    """One summary per group, sorted by pooled WER ascending and ranked.

    ``grouping`` is one field or a sequence of fields from :data:`GROUPINGS`;
    a combined key joins the field values with ``|``.  A record belongs to
    every ablation case its flags allow.  ``ignored`` maps inquiry id to its
    count of ignored units (not attributed to case groups, which hold only
    scoreable units).  Groups without data come last, unranked.
    """
    fields = _normalize_grouping(grouping)
    index = _manifest_index(manifest)
    group_name = "+".join(fields)
    acc: dict[str, ReportSummary] = {}

    def add(key: str, summary: ReportSummary):
        acc[key] = acc[key].merge(summary, group_name, key) if key in acc else summary

    def combos(meta, run, cases):
        keys = [""]
        for f in fields:
            keys = [f"{k}|{v}" if k else v for k in keys for v in _keys_for(meta, f, run, cases)]
        return keys

    seen_runs: dict[str, set[str]] = {}
    for rec in records:
        meta = index.get(rec.inquiry_id)
        if meta is None:
            raise UnknownInquiryInRecords(f"records mention inquiry {rec.inquiry_id!r} missing from manifest")
        seen_runs.setdefault(rec.inquiry_id, set()).add(rec.run)
        for key in combos(meta, rec.run, cases_for(rec.flags)):
            add(key, ReportSummary(group_name, key, rec.totals, 0, rec.phenomena))

    if ignored and "case" not in fields:
        for inquiry_id, count in sorted(ignored.items()):
            meta = index.get(inquiry_id)
            if meta is None:
                raise UnknownInquiryInRecords(f"ignored counts for unknown inquiry {inquiry_id!r}")
            for run in sorted(seen_runs.get(inquiry_id, {""})):
                for key in combos(meta, run, ()):
                    add(key, ReportSummary(group_name, key, Totals(), count))

    return rank(acc.values())


def rank(summaries: Iterable[ReportSummary]) -> list[ReportSummary]:
    """Sort by pooled WER (ties by key) and number the groups 1..n."""
    with_data = sorted((s for s in summaries if s.pooled_wer is not None), key=lambda s: (s.pooled_wer, s.key))
    no_data = sorted((s for s in summaries if s.pooled_wer is None), key=lambda s: s.key)
    ranked = [ReportSummary(s.group, s.key, s.totals, s.ignored, s.phenomena, i) for i, s in enumerate(with_data, 1)]
    return ranked + [ReportSummary(s.group, s.key, s.totals, s.ignored, s.phenomena, None) for s in no_data]


# -- persistence ------------------------------------------------------------

SUMMARY_COLUMNS = (
    "group", "key", "rank", "band", "units", "ignored", "ref_tokens", "word_edits",
    "pooled_wer", "macro_wer", "ref_chars", "char_edits", "pooled_cer", "macro_cer",
    "overlap", "incomprehension", "hypothesis",
)  # fmt: skip


def fmt(value: Optional[float], locale: str = "machine") -> str:
    if value is None:
        return "NA"
    text = f"{value:.3f}"
    return text.replace(".", ",") if locale == "pt" else text


def _summary_row(s: ReportSummary) -> list[str]:
    t = s.totals
    return [
        s.group, s.key, "" if s.rank is None else str(s.rank), s.band.value if s.band else "NA",
        str(t.units), str(s.ignored), str(t.ref_tokens), str(t.word_edits),
        fmt(s.pooled_wer), fmt(s.macro_wer), str(t.ref_chars), str(t.char_edits),
        fmt(s.pooled_cer), fmt(s.macro_cer),
        str(s.phenomena.overlap), str(s.phenomena.incomprehension), str(s.phenomena.hypothesis),
    ]  # fmt: skip


def _summary_record(s: ReportSummary) -> dict:
    t = s.totals
    return {
        "group": s.group,
        "key": s.key,
        "rank": s.rank,
        "band": s.band.value if s.band else None,
        "units": t.units,
        "ignored": s.ignored,
        "ref_tokens": t.ref_tokens,
        "word_edits": t.word_edits,
        "ref_chars": t.ref_chars,
        "char_edits": t.char_edits,
        "wer_sum": t.wer_sum,
        "cer_sum": t.cer_sum,
        "pooled_wer": None if s.pooled_wer is None else round(s.pooled_wer, 3),
        "macro_wer": None if s.macro_wer is None else round(s.macro_wer, 3),
        "pooled_cer": None if s.pooled_cer is None else round(s.pooled_cer, 3),
        "macro_cer": None if s.macro_cer is None else round(s.macro_cer, 3),
        "overlap": s.phenomena.overlap,
        "incomprehension": s.phenomena.incomprehension,
        "hypothesis": s.phenomena.hypothesis,
    }


def dumps(summaries: Sequence[ReportSummary], format: str = "csv") -> str:
    if format in ("csv", "tsv"):
        buf = io.StringIO()
        writer = csv.writer(buf, delimiter="," if format == "csv" else "\t", lineterminator="\n")
        writer.writerow(SUMMARY_COLUMNS)
        for s in summaries:
            writer.writerow(_summary_row(s))
        return buf.getvalue()
    if format == "jsonl":
        return "".join(json.dumps(_summary_record(s), ensure_ascii=False, sort_keys=True) + "\n" for s in summaries)
    raise ValueError(f"unknown format {format!r}")


def emit(summaries: Sequence[ReportSummary], format: str, path) -> Path:
    """Write summaries as ``csv``, ``tsv`` or ``jsonl``; output bytes are deterministic."""
    path = Path(path)
    data = dumps(summaries, format)
    try:
        path.write_text(data, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
    return path


def load(path) -> list[ReportSummary]:
    """Read summaries written by :func:`emit` in ``jsonl`` format."""
    out = []
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    for line in lines:
        if not line.strip():
            continue
        d = json.loads(line)
        totals = Totals(d["units"], d["word_edits"], d["ref_tokens"], d["char_edits"], d["ref_chars"], d["wer_sum"], d["cer_sum"])
        phen = PhenomenonCounts(d["overlap"], d["incomprehension"], d["hypothesis"])
        out.append(ReportSummary(d["group"], d["key"], totals, d["ignored"], phen, d["rank"]))
    return out


def render_text(summaries: Sequence[ReportSummary], locale: str = "machine") -> str:
    """Fixed-width table for people; ``locale="pt"`` uses decimal commas."""
    header = ["rank", "key", "band", "units", "ignored", "WER", "macro WER", "CER", "macro CER"]
    rows = [
        [
            "" if s.rank is None else str(s.rank), s.key, s.band.value if s.band else "no data",
            str(s.totals.units), str(s.ignored), fmt(s.pooled_wer, locale), fmt(s.macro_wer, locale),
            fmt(s.pooled_cer, locale), fmt(s.macro_cer, locale),
        ]
        for s in summaries
    ]  # fmt: skip
    widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in [header] + rows]
    return "\n".join(lines) + "\n"


# -- per-unit records -------------------------------------------------------

RECORD_COLUMNS = (
    "run", "inquiry", "unit", "missing", "overlap", "incomprehension", "hypothesis",
    "ref_tokens", "hyp_tokens", "hits", "substitutions", "deletions", "insertions", "wer",
    "ref_chars", "char_edits", "cer", "ref", "hyp",
)  # fmt: skip


def dumps_records(records: Iterable[ScoreRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="\t", lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(RECORD_COLUMNS)
    for r in records:
        a = r.alignment
        writer.writerow(
            [
                r.run, r.inquiry_id, r.unit_id, int(r.missing_hypothesis),
                r.phenomena.overlap, r.phenomena.incomprehension, r.phenomena.hypothesis,
                r.ref_len, r.hyp_len, a.hits, a.substitutions, a.deletions, a.insertions, fmt(r.wer),
                r.ref_chars, r.char_edits, fmt(r.cer), " ".join(r.ref), " ".join(r.hyp),
            ]
        )  # fmt: skip
    return buf.getvalue()


def load_records(path) -> list[ScoreRecord]:
    """Re-read a records file, re-aligning each unit and checking the stored counts."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    out = []
    for row in csv.DictReader(io.StringIO(text), delimiter="\t"):
        phen = PhenomenonCounts(int(row["overlap"]), int(row["incomprehension"]), int(row["hypothesis"]))
        flags = PhenomenonFlags(phen.incomprehension > 0, phen.hypothesis > 0, phen.overlap > 0)
        rec = make_record(
            row["inquiry"],
            row["unit"],
            row["ref"].split(),
            row["hyp"].split(),
            flags=flags,
            phenomena=phen,
            missing_hypothesis=row["missing"] == "1",
            run=row["run"],
        )
        a = rec.alignment
        stored = tuple(int(row[k]) for k in ("hits", "substitutions", "deletions", "insertions", "char_edits"))
        if stored != (a.hits, a.substitutions, a.deletions, a.insertions, rec.char_edits):
            raise InvariantViolation(f"{path}: stored counts for {rec.inquiry_id}/{rec.unit_id} do not re-derive")
        out.append(rec)
    return out


# -- model x inquiry comparison ---------------------------------------------


@dataclass(frozen=True)
class ComparisonCell:
    row: str
    column: str
    wer: Optional[float]
    cer: Optional[float]
    wer_rank: Optional[int] = None
    cer_rank: Optional[int] = None


def comparison_table(records: Sequence[ScoreRecord], manifest) -> list[ComparisonCell]:
    """Runs (rows) x inquiries plus ``All`` (columns), with an ``Average`` row.

    Each cell is the pooled WER/CER of that run on that column; ``Average``
    is the mean over runs.  Ranks order the runs within a column, 1 = best.
    """
    index = _manifest_index(manifest)
    inquiry_order = [i for i in index if any(r.inquiry_id == i for r in records)]
    runs = sorted({r.run for r in records})
    by_run = {run: [r for r in records if r.run == run] for run in runs}
    cells: list[ComparisonCell] = []
    for col in inquiry_order + ["All"]:
        column = []
        for run in runs:
            recs = [r for r in by_run[run] if col == "All" or r.inquiry_id == col]
            t = Totals()
            for r in recs:
                t = t + r.totals
            column.append(ComparisonCell(run, col, t.pooled_wer, t.pooled_cer))
        wer_order = sorted((c for c in column if c.wer is not None), key=lambda c: (c.wer, c.row))
        cer_order = sorted((c for c in column if c.cer is not None), key=lambda c: (c.cer, c.row))
        wr = {c.row: i for i, c in enumerate(wer_order, 1)}
        cr = {c.row: i for i, c in enumerate(cer_order, 1)}
        cells += [ComparisonCell(c.row, c.column, c.wer, c.cer, wr.get(c.row), cr.get(c.row)) for c in column]
        wers = [c.wer for c in column if c.wer is not None]
        cers = [c.cer for c in column if c.cer is not None]
        cells.append(
            ComparisonCell("Average", col, sum(wers) / len(wers) if wers else None, sum(cers) / len(cers) if cers else None)
        )
    return cells


def dumps_comparison(cells: Sequence[ComparisonCell]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["row", "column", "wer", "cer", "wer_rank", "cer_rank"])
    for c in cells:
        writer.writerow([c.row, c.column, fmt(c.wer), fmt(c.cer), c.wer_rank or "", c.cer_rank or ""])
    return buf.getvalue()
