"""Corpus manifest and hypothesis file I/O.

The manifest is a comma- or tab-separated table with a header row::

    id,genre,quality,duration,transcript
    SP_D2_360,D2,-,1:03:32,transcripts/SP_D2_360.txt

``quality`` accepts ``+``/``-``/``Mixed`` or ``Good``/``Bad``/``Mixed``.
Relative transcript paths are resolved against the manifest's directory.

Hypothesis files hold one ``unit-id<TAB>text`` record per line.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Iterable, Mapping

from .exceptions import IoFailure, MalformedHypothesisFile, MalformedManifest
from .transcript import InquiryMeta, format_duration

_PATH_COLUMNS = ("transcript", "transcript-path", "transcript_path", "path")
MANIFEST_COLUMNS = ("id", "genre", "quality", "duration", "transcript")


def _read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise MalformedManifest(f"{path} is not valid UTF-8: {exc}") from exc


def parse_manifest(text: str, base_dir: Path = Path(".")) -> list[InquiryMeta]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise MalformedManifest("manifest is empty")
    delimiter = "\t" if "\t" in lines[0] else ","
    reader = csv.DictReader(io.StringIO("\n".join(lines)), delimiter=delimiter)
    header = [h.strip().lower() for h in reader.fieldnames or []]
    reader.fieldnames = header
    missing = [c for c in ("id", "genre", "quality", "duration") if c not in header]
    path_col = next((c for c in _PATH_COLUMNS if c in header), None)
    if path_col is None:
        missing.append("transcript")
    if missing:
        raise MalformedManifest(f"manifest lacks columns: {', '.join(missing)}")

    metas, seen = [], set()
    for lineno, row in enumerate(reader, start=2):
        row = {k: (v or "").strip() for k, v in row.items() if k is not None}
        inquiry_id = row.get("id", "")
        if not inquiry_id:
            raise MalformedManifest(f"manifest line {lineno}: empty id")
        if inquiry_id in seen:
            raise MalformedManifest(f"manifest line {lineno}: duplicate id {inquiry_id!r}")
        seen.add(inquiry_id)
        if not row.get(path_col):
            raise MalformedManifest(f"manifest line {lineno}: {inquiry_id} has no transcript path")
        meta = InquiryMeta.coerce(inquiry_id, {**row, "transcript": str(base_dir / row[path_col])})
        metas.append(meta)
    return metas


def read_manifest(path) -> list[InquiryMeta]:
    path = Path(path)
    return parse_manifest(_read_text(path), path.parent)


def write_manifest(metas: Iterable[InquiryMeta], path, relative_to=None) -> None:
    path = Path(path)
    base = Path(relative_to) if relative_to is not None else path.parent
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(MANIFEST_COLUMNS)
    for m in metas:
        transcript = m.transcript
        if transcript is not None and transcript.is_absolute():
            try:
                transcript = transcript.relative_to(base.resolve())
            except ValueError:
                pass
        writer.writerow([m.id, m.genre.value, m.quality.value, format_duration(m.duration), transcript or ""])
    path.write_text(buf.getvalue(), encoding="utf-8", newline="\n")


def parse_hypotheses(text: str, source: str = "<hypotheses>") -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.split("\n"), start=1):
        line = line.rstrip("\r")
        if not line.strip():
            continue
        unit_id, _, hyp = line.partition("\t")
        unit_id = unit_id.strip()
        if not unit_id:
            raise MalformedHypothesisFile(f"{source}:{lineno}: missing unit id")
        if unit_id in out:
            raise MalformedHypothesisFile(f"{source}:{lineno}: duplicate unit id {unit_id!r}")
        out[unit_id] = hyp
    return out


def read_hypotheses(path) -> dict[str, str]:
    path = Path(path)
    return parse_hypotheses(_read_text(path), str(path))


def write_hypotheses(hypotheses: Mapping[str, str], path) -> None:
    lines = [f"{uid}\t{' '.join(text.split())}\n" for uid, text in hypotheses.items()]
    Path(path).write_text("".join(lines), encoding="utf-8", newline="\n")
