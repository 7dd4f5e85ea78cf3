"""Command-line front end: ``nurceval <command> [options]``.

Commands
--------
normalize    normalized references per inquiry plus a diagnostics table
score        per-unit records and grouped WER/CER summaries
ablate       WER/CER per ablation case, per inquiry and corpus-wide
stats        phenomenon span counts per inquiry
report       regroup existing records files; model x inquiry comparison
dump-config  print the normalizer configuration as JSON

Exit codes: 0 success, 1 I/O failure, 2 input-format error, 3 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .ablation import Case, build_cases, scores_from_records
from .corpus import read_hypotheses, read_manifest
from .exceptions import InputFormatError, InvariantViolation, IoFailure, NurcEvalError
from .metrics import InquiryScore, ScoreRecord, score_inquiry
from .normalizer import DEFAULT_CONFIG, NormalizedText, NormalizerConfig, normalize_unit
from .reporting import (
    GROUPINGS,
    ReportSummary,
    aggregate,
    comparison_table,
    dumps,
    dumps_comparison,
    dumps_records,
    load_records,
    render_text,
)
from .transcript import Inquiry, InquiryMeta, PhenomenonCounts, count_phenomena, read_inquiry

log = logging.getLogger("nurceval")

EXIT_OK, EXIT_IO, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3
DEFAULT_GROUPS = ("inquiry", "genre", "quality", "all")


# -- per-inquiry work (runs in worker processes) ----------------------------


@dataclass
class Task:
    meta: InquiryMeta
    config: NormalizerConfig
    hyp_path: Optional[Path] = None
    cache_dir: Optional[Path] = None
    normalize_hypotheses: bool = True
    run: str = ""


@dataclass
class Outcome:
    inquiry_id: str
    inquiry: Optional[Inquiry] = None
    references: dict = field(default_factory=dict)
    score: Optional[InquiryScore] = None
    hyp_file_missing: bool = False
    error: Optional[str] = None
    error_kind: str = ""


def _cache_key(transcript: bytes, config: NormalizerConfig) -> str:
    h = hashlib.sha256()
    h.update(__version__.encode())
    h.update(b"\0")
    h.update(config.fingerprint().encode())
    h.update(b"\0")
    h.update(transcript)
    return h.hexdigest()


def _load_references(inquiry: Inquiry, transcript: bytes, task: Task) -> dict[str, NormalizedText]:
    if task.cache_dir is None:
        return {u.id: normalize_unit(u, task.config) for u in inquiry.units}
    path = task.cache_dir / f"{_cache_key(transcript, task.config)}.json"
    if path.exists():
        data = json.loads(path.read_text(encoding="utf-8"))
        return {
            uid: NormalizedText(tuple(d["tokens"]), tuple(d["trace"]), tuple(d["diagnostics"]), d["review"])
            for uid, d in data.items()
        }
    refs = {u.id: normalize_unit(u, task.config) for u in inquiry.units}
    payload = {
        uid: {"tokens": list(r.tokens), "trace": list(r.trace), "diagnostics": list(r.diagnostics), "review": r.review}
        for uid, r in refs.items()
    }
    fd, tmp = tempfile.mkstemp(dir=task.cache_dir, suffix=".tmp")
    with os.fdopen(fd, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False)
    os.replace(tmp, path)
    return refs


def process_inquiry(task: Task) -> Outcome:
    meta = task.meta
    out = Outcome(meta.id)
    try:
        transcript = Path(meta.transcript).read_bytes()
        inquiry = read_inquiry(meta.transcript, meta)
        out.inquiry = inquiry
        out.references = _load_references(inquiry, transcript, task)
        if task.hyp_path is not None:
            if task.hyp_path.exists():
                hyps = read_hypotheses(task.hyp_path)
            else:
                hyps = {}
                out.hyp_file_missing = True
            out.score = score_inquiry(
                inquiry,
                hyps,
                task.config,
                normalize_hypotheses=task.normalize_hypotheses,
                references=out.references,
                run=task.run,
            )
    except InvariantViolation as exc:
        out.error, out.error_kind = str(exc), "internal"
    except (InputFormatError, UnicodeDecodeError) as exc:
        out.error, out.error_kind = str(exc), "input"
    except (OSError, IoFailure) as exc:
        out.error, out.error_kind = str(exc), "io"
    return out


def run_tasks(tasks: Sequence[Task], jobs: int) -> list[Outcome]:
    """Process inquiries, preserving manifest order whatever ``jobs`` is."""
    if jobs <= 1 or len(tasks) <= 1:
        return [process_inquiry(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
        return list(pool.map(process_inquiry, tasks, chunksize=1))


# -- helpers ------------------------------------------------------------------


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EXIT_IO) from exc


def _load_config(path: Optional[str]) -> NormalizerConfig:
    if path is None:
        return DEFAULT_CONFIG
    try:
        return NormalizerConfig.from_file(path)
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc}", EXIT_IO) from exc
    except (ValueError, TypeError) as exc:
        raise CliError(f"invalid config {path}: {exc}", EXIT_INPUT) from exc


def _load_manifest(args) -> list[InquiryMeta]:
    try:
        metas = read_manifest(args.manifest)
    except IoFailure as exc:
        raise CliError(str(exc), EXIT_IO) from exc
    except InputFormatError as exc:
        raise CliError(str(exc), EXIT_INPUT) from exc
    missing = [m.id for m in metas if not Path(m.transcript).is_file()]
    if missing:
        raise CliError(f"transcripts not found for: {', '.join(missing)}", EXIT_INPUT)
    return metas


def _prepare(args, with_hyps: bool) -> tuple[list[InquiryMeta], list[Task], Path]:
    """Validate every input path before any output is written."""
    config = _load_config(args.config)
    metas = _load_manifest(args)
    hyp_dir = None
    if with_hyps:
        hyp_dir = Path(args.hyp_dir)
        if not hyp_dir.is_dir():
            raise CliError(f"hypothesis directory not found: {hyp_dir}", EXIT_IO)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        cache = out / ".cache"
        cache.mkdir(exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create output directory {out}: {exc}", EXIT_IO) from exc
    tasks = [
        Task(
            meta=m,
            config=config,
            hyp_path=hyp_dir / f"{m.id}.hyp" if hyp_dir is not None else None,
            cache_dir=cache,
            normalize_hypotheses=not getattr(args, "raw_hypotheses", False),
            run=getattr(args, "run_label", "") or "",
        )
        for m in metas
    ]
    return metas, tasks, out


def _collect(outcomes: Sequence[Outcome], strict: bool) -> list[Outcome]:
    failed = [o for o in outcomes if o.error]
    for o in failed:
        log.error("%s: %s", o.inquiry_id, o.error)
    if failed and strict:
        worst = max(failed, key=lambda o: {"io": 1, "input": 2, "internal": 3}[o.error_kind])
        code = {"io": EXIT_IO, "input": EXIT_INPUT, "internal": EXIT_INTERNAL}[worst.error_kind]
        raise CliError(f"{len(failed)} inquiries failed (strict mode, nothing written)", code)
    return [o for o in outcomes if not o.error]


def _finish(outcomes: Sequence[Outcome]) -> int:
    failed = [o for o in outcomes if o.error]
    if not failed:
        return EXIT_OK
    kinds = {o.error_kind for o in failed}
    return EXIT_INTERNAL if "internal" in kinds else EXIT_INPUT if "input" in kinds else EXIT_IO


def _diagnostic_rows(outcomes: Sequence[Outcome]) -> list[list[str]]:
    rows = []
    for o in outcomes:
        if o.error:
            rows.append([o.inquiry_id, "", "failed", "0", "", "", o.error])
            continue
        missing = set(o.score.missing) if o.score else set()
        for unit in o.inquiry.units:
            ref = o.references[unit.id]
            status = "review" if ref.review else "ignored" if ref.ignored else "ok"
            marks = "".join(sorted({d.detail for d in unit.diagnostics if d.code == "unknown_mark"}))
            notes = [d.detail for d in unit.diagnostics if d.code != "unknown_mark"] + list(ref.diagnostics)
            if unit.id in missing:
                notes.append("missing hypothesis")
            rows.append(
                [o.inquiry_id, unit.id, status, str(len(ref.tokens)), "".join(map(str, ref.trace)), marks, "; ".join(notes)]
            )
    return rows


def _tsv(header: Sequence[str], rows) -> str:
    clean = lambda v: str(v).replace("\t", " ").replace("\n", " ")  # noqa: E731
    return "".join("\t".join(clean(v) for v in row) + "\n" for row in [header, *rows])


def _write_diagnostics(out: Path, outcomes) -> None:
    header = ("inquiry", "unit", "status", "tokens", "trace", "unknown_marks", "notes")
    _write(out / "diagnostics.tsv", _tsv(header, _diagnostic_rows(outcomes)))


def _write_summaries(out: Path, stem: str, summaries: Sequence[ReportSummary], locale: str) -> None:
    _write(out / f"{stem}.csv", dumps(summaries, "csv"))
    _write(out / f"{stem}.jsonl", dumps(summaries, "jsonl"))
    if locale != "machine":
        _write(out / f"{stem}.txt", render_text(summaries, locale))


def _groupings(args) -> list[str]:
    return list(dict.fromkeys(args.group_by or DEFAULT_GROUPS))


# -- commands -----------------------------------------------------------------


def cmd_normalize(args) -> int:
    _, tasks, out = _prepare(args, with_hyps=False)
    outcomes = run_tasks(tasks, args.jobs)
    ok = _collect(outcomes, args.strict)
    norm_dir = out / "normalized"
    norm_dir.mkdir(exist_ok=True)
    n_units = n_ignored = 0
    for o in ok:
        lines = []
        for unit in o.inquiry.units:
            ref = o.references[unit.id]
            n_units += 1
            if ref.ignored:
                n_ignored += 1
                continue
            lines.append(f"{unit.id}\t{ref.text}\n")
        _write(norm_dir / f"{o.inquiry_id}.ref", "".join(lines))
    _write_diagnostics(out, outcomes)
    print(
        f"normalized {n_units - n_ignored} units in {len(ok)} inquiries; {n_ignored} ignored; "
        f"{len(outcomes) - len(ok)} inquiries failed",
        file=sys.stderr,
    )
    return _finish(outcomes)


def _scored(args):
    metas, tasks, out = _prepare(args, with_hyps=True)
    outcomes = run_tasks(tasks, args.jobs)
    ok = _collect(outcomes, args.strict)
    records = [r for o in ok for r in o.score.records]
    ignored = {o.inquiry_id: len(o.score.ignored) for o in ok}
    return metas, out, outcomes, ok, records, ignored


def _warn_missing(ok) -> None:
    files = sum(o.hyp_file_missing for o in ok)
    units = sum(len(o.score.missing) for o in ok)
    if files or units:
        print(f"warning: {files} hypothesis files missing; {units} units scored against empty hypotheses", file=sys.stderr)


def cmd_score(args) -> int:
    metas, out, outcomes, ok, records, ignored = _scored(args)
    _write(out / "records.tsv", dumps_records(records))
    for g in _groupings(args):
        _write_summaries(out, f"summary_{g}", aggregate(records, metas, g, ignored), args.locale)
    _write_diagnostics(out, outcomes)
    _warn_missing(ok)
    print(f"scored {len(records)} units in {len(ok)} inquiries; {len(outcomes) - len(ok)} failed", file=sys.stderr)
    return _finish(outcomes)


def cmd_ablate(args) -> int:
    metas, out, outcomes, ok, records, ignored = _scored(args)
    rows = []
    for o in ok:
        per_case = scores_from_records(o.score.records, build_cases(o.inquiry, o.score.ignored))
        for c in Case:
            rows.append(ReportSummary("inquiry+case", f"{o.inquiry_id}|{c.value}", per_case[c]))
    _write_summaries(out, "ablation_inquiry", rows, args.locale)
    _write_summaries(out, "ablation", aggregate(records, metas, "case"), args.locale)
    _write(out / "records.tsv", dumps_records(records))
    _write_diagnostics(out, outcomes)
    _warn_missing(ok)
    return _finish(outcomes)


def cmd_stats(args) -> int:
    _, tasks, out = _prepare(args, with_hyps=False)
    outcomes = run_tasks(tasks, args.jobs)
    ok = _collect(outcomes, args.strict)
    rows = []
    for o in ok:
        c: PhenomenonCounts = count_phenomena(o.inquiry)
        rows.append([o.inquiry_id, o.inquiry.genre.value, o.inquiry.quality.value, len(o.inquiry.units), c.overlap, c.incomprehension, c.hypothesis])
    header = ("inquiry", "genre", "quality", "units", "overlap", "incomprehension", "hypothesis")
    _write(out / "stats.csv", "".join(",".join(map(str, r)) + "\n" for r in [header, *rows]))
    _write_diagnostics(out, outcomes)
    return _finish(outcomes)


def cmd_report(args) -> int:
    try:
        metas = read_manifest(args.manifest)
    except IoFailure as exc:
        raise CliError(str(exc), EXIT_IO) from exc
    except InputFormatError as exc:
        raise CliError(str(exc), EXIT_INPUT) from exc
    out = Path(args.out)
    paths = [Path(p) for p in args.records] if args.records else [out / "records.tsv"]
    records: list[ScoreRecord] = []
    for p in paths:
        try:
            records += load_records(p)
        except IoFailure as exc:
            raise CliError(str(exc), EXIT_IO) from exc
    out.mkdir(parents=True, exist_ok=True)
    try:
        for g in _groupings(args):
            summaries = aggregate(records, metas, g)
            _write(out / f"report_{g}.csv", dumps(summaries, "csv"))
            _write(out / f"report_{g}.jsonl", dumps(summaries, "jsonl"))
            _write(out / f"report_{g}.txt", render_text(summaries, args.locale))
    except InputFormatError as exc:
        raise CliError(str(exc), EXIT_INPUT) from exc
    _write(out / "comparison.csv", dumps_comparison(comparison_table(records, metas)))
    return EXIT_OK


def cmd_dump_config(args) -> int:
    text = _load_config(args.config).dumps()
    if args.out:
        _write(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nurceval", description="Normalize NURC transcripts and score ASR output.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, hyps=False, manifest=True):
        if manifest:
            p.add_argument("--manifest", required=True, help="corpus manifest (csv/tsv)")
        p.add_argument("--config", help="normalizer config JSON overriding the defaults")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker processes (default: all cores)")
        p.add_argument("--strict", action="store_true", help="abort if any inquiry fails")
        p.add_argument("--locale", choices=("machine", "pt"), default="machine", help="decimal style of text reports")
        if hyps:
            p.add_argument("--hyp-dir", required=True, help="directory with one <id>.hyp file per inquiry")
            p.add_argument("--group-by", action="append", choices=GROUPINGS, help="summary grouping (repeatable)")
            p.add_argument("--run-label", default="", help="label stored with every record, e.g. the ASR model")
            p.add_argument("--raw-hypotheses", action="store_true", help="split hypotheses on whitespace only")

    common(sub.add_parser("normalize", help="write normalized references"))
    common(sub.add_parser("score", help="score hypotheses"), hyps=True)
    common(sub.add_parser("ablate", help="WER/CER per ablation case"), hyps=True)
    common(sub.add_parser("stats", help="phenomenon counts per inquiry"))

    p = sub.add_parser("report", help="regroup records files")
    p.add_argument("--manifest", required=True)
    p.add_argument("--records", action="append", help="records.tsv from `score` (repeatable)")
    p.add_argument("--out", required=True)
    p.add_argument("--group-by", action="append", choices=GROUPINGS)
    p.add_argument("--locale", choices=("machine", "pt"), default="machine")

    p = sub.add_parser("dump-config", help="print the normalizer configuration")
    p.add_argument("--config")
    p.add_argument("--out")
    return parser


COMMANDS = {
    "normalize": cmd_normalize,
    "score": cmd_score,
    "ablate": cmd_ablate,
    "stats": cmd_stats,
    "report": cmd_report,
    "dump-config": cmd_dump_config,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except InvariantViolation as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except InputFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (IoFailure, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NurcEvalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
