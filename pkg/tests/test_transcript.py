import json
import re
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nurceval.exceptions import EmptyFile, MalformedManifest, UnbalancedDelimiterWarning
from nurceval.transcript import (
    AnnotationSpan,
    Genre,
    Inquiry,
    PhenomenonCounts,
    PhenomenonFlags,
    Quality,
    SpanKind,
    UtteranceUnit,
    count_phenomena,
    detect_spans,
    parse_duration,
    parse_inquiry,
    parse_inquiry_records,
    read_inquiry,
    scan,
)

from .conftest import GOLDEN_REFS

META = {"genre": "D2", "quality": "-", "duration": "1:03:32"}


def kinds(raw):
    return [s.kind for s in detect_spans(raw)]


class TestDetectSpans:
    def test_incomprehension(self):
        assert detect_spans("( )") == [AnnotationSpan(SpanKind.INCOMPREHENSION, 0, 3)]

    def test_hypothesis(self):
        spans = detect_spans("isso eu (não) soube")
        assert spans == [AnnotationSpan(SpanKind.HYPOTHESIS, 8, 13)]
        assert spans[0].text("isso eu (não) soube") == "(não)"

    def test_lengthening(self):
        assert detect_spans("ter:: éh") == [AnnotationSpan(SpanKind.LENGTHENING, 3, 5)]

    def test_pause_runs(self):
        raw = "eu VI... lá…"
        assert [(s.kind, s.text(raw)) for s in detect_spans(raw)] == [
            (SpanKind.PAUSE, "..."),
            (SpanKind.PAUSE, "…"),
        ]

    def test_comment_wins_over_parenthesis(self):
        raw = "disse ((risos)) que sim"
        assert detect_spans(raw) == [AnnotationSpan(SpanKind.COMMENT, 6, 15)]

    def test_comment_consumes_nested_parentheses(self):
        raw = "((a (b) c)) d"
        assert detect_spans(raw) == [AnnotationSpan(SpanKind.COMMENT, 0, 11)]

    def test_unclosed_overlap_runs_to_end(self):
        raw = "a [b c"
        assert detect_spans(raw) == [AnnotationSpan(SpanKind.OVERLAP, 2, 6)]

    def test_closed_overlap(self):
        raw = "a [b] c"
        assert detect_spans(raw) == [AnnotationSpan(SpanKind.OVERLAP, 2, 5)]

    def test_overlap_encloses_other_spans(self):
        raw = "[( ) (não está)"
        spans = detect_spans(raw)
        assert [s.kind for s in spans] == [SpanKind.OVERLAP, SpanKind.INCOMPREHENSION, SpanKind.HYPOTHESIS]
        assert spans[0].start == 0 and spans[0].end == len(raw)

    def test_unbalanced_paren_warns_and_extends(self):
        raw = "a (não está"
        with pytest.warns(UnbalancedDelimiterWarning):
            spans = detect_spans(raw)
        assert spans == [AnnotationSpan(SpanKind.HYPOTHESIS, 2, len(raw))]

    def test_unbalanced_comment_warns(self):
        with pytest.warns(UnbalancedDelimiterWarning):
            spans = detect_spans("a ((risos")
        assert spans == [AnnotationSpan(SpanKind.COMMENT, 2, 9)]

    def test_unclosed_overlap_does_not_warn(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            detect_spans("a [b")

    def test_unknown_marks_are_diagnosed(self):
        _, diags = scan("ca/ casa * ok")
        assert [(d.code, d.detail) for d in diags] == [("unknown_mark", "/"), ("unknown_mark", "*")]

    def test_plain_text(self):
        assert detect_spans("hoje fui ao mercado") == []

    def test_deterministic(self):
        raw = GOLDEN_REFS[0][0]
        assert detect_spans(raw) == detect_spans(raw)


PATTERNS = {
    SpanKind.COMMENT: re.compile(r"\(\(.*(\)\))?", re.S),
    SpanKind.INCOMPREHENSION: re.compile(r"\(\s*\)?"),
    SpanKind.HYPOTHESIS: re.compile(r"\(.*\S.*\)?", re.S),
    SpanKind.OVERLAP: re.compile(r"\[.*", re.S),
    SpanKind.LENGTHENING: re.compile(r":{2,}"),
    SpanKind.PAUSE: re.compile(r"\.{3,}|…"),
}

fragments = st.sampled_from(
    ["a", "não", "VI", " ", "((risos))", "((", "))", "( )", "(", ")", "(sim)", "[", "]", "::", ":", "...", "…", "/", "12"]
)
unit_text = st.lists(fragments, max_size=12).map("".join)


@settings(max_examples=400, deadline=None)
@given(unit_text)
def test_span_soundness_and_flags(raw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UnbalancedDelimiterWarning)
        spans = detect_spans(raw)
    for s in spans:
        assert 0 <= s.start < s.end <= len(raw)
        assert PATTERNS[s.kind].fullmatch(s.text(raw)), (s, raw)
    # only overlap spans may contain others
    for x in spans:
        for y in spans:
            if x is y or x.end <= y.start or y.end <= x.start:
                continue
            outer, inner = (x, y) if (x.start, -x.end) <= (y.start, -y.end) else (y, x)
            assert outer.kind is SpanKind.OVERLAP and outer.start <= inner.start and inner.end <= outer.end
    unit = UtteranceUnit.from_text(raw)
    assert unit.flags == PhenomenonFlags(
        incomprehension=any(s.kind is SpanKind.INCOMPREHENSION for s in spans),
        hypothesis=any(s.kind is SpanKind.HYPOTHESIS for s in spans),
        overlap=any(s.kind is SpanKind.OVERLAP for s in spans),
    )


class TestParseInquiry:
    def test_golden_flags(self):
        inq = parse_inquiry("e dão muito trabalho ... [( ) (não está muito na idade né?\n", "SP_D2_360", META)
        assert inq.units[0].flags == PhenomenonFlags(incomprehension=True, hypothesis=True, overlap=True)

    def test_clean_line(self):
        inq = parse_inquiry("hoje fui ao mercado", "X", META)
        unit = inq.units[0]
        assert unit.spans == () and unit.flags == PhenomenonFlags()

    def test_comment_sets_no_flag(self):
        unit = parse_inquiry("disse ((risos)) que sim", "X", META).units[0]
        assert [s.kind for s in unit.spans] == [SpanKind.COMMENT]
        assert not unit.flags.any

    def test_metadata(self):
        inq = parse_inquiry("a", "SP_D2_360", META)
        assert (inq.genre, inq.quality, inq.duration) == (Genre.D2, Quality.BAD, 3812)

    def test_speaker_prefix(self):
        inq = parse_inquiry("L1:\tbom dia\nDoc.:\tsim\nsem prefixo", "X", META)
        assert [(u.speaker, u.raw) for u in inq.units] == [("L1", "bom dia"), ("Doc.", "sim"), ("", "sem prefixo")]
        assert [u.id for u in inq.units] == ["1", "2", "3"]

    def test_round_trip(self):
        text = "L1:\tbom [dia\n\n  \nhoje ((risos)) fui::\r\nL2:\t( ) (não)\n"
        inq = parse_inquiry(text, "X", META)
        non_blank = [ln.rstrip("\r") for ln in text.split("\n") if ln.strip()]
        assert [u.line for u in inq.units] == non_blank

    @pytest.mark.parametrize("missing", ["genre", "quality", "duration"])
    def test_malformed_manifest(self, missing):
        meta = {k: v for k, v in META.items() if k != missing}
        with pytest.raises(MalformedManifest):
            parse_inquiry("a", "X", meta)

    def test_bad_quality(self):
        with pytest.raises(MalformedManifest):
            parse_inquiry("a", "X", {**META, "quality": "great"})

    def test_empty_file(self):
        with pytest.raises(EmptyFile):
            parse_inquiry("\n  \n", "X", META)

    def test_records(self):
        inq = parse_inquiry_records(
            [{"id": "u7", "speaker": "L1", "text": "a [b", "start": 1.5, "end": 2.0}, {"text": "c"}], "X", META
        )
        assert [u.id for u in inq.units] == ["u7", "2"]
        assert inq.units[0].start_time == 1.5 and inq.units[0].flags.overlap

    def test_read_jsonl(self, tmp_path, meta):
        path = tmp_path / "t.jsonl"
        path.write_text(json.dumps({"text": "( ) sim", "speaker": "L2"}) + "\n", encoding="utf-8")
        inq = read_inquiry(path, meta)
        assert inq.units[0].flags.incomprehension and inq.units[0].speaker == "L2"

    def test_units_are_immutable(self):
        unit = UtteranceUnit.from_text("a")
        with pytest.raises(AttributeError):
            unit.raw = "b"


@pytest.mark.parametrize(
    "value, seconds", [("1:03:32", 3812), ("00:30:51", 1851), ("0:00:00", 0), ("42", 42), (7, 7)]
)
def test_parse_duration(value, seconds):
    assert parse_duration(value) == seconds


@pytest.mark.parametrize("value", ["1:75:00", "abc", "-1", -3])
def test_parse_duration_rejects(value):
    with pytest.raises(ValueError):
        parse_duration(value)


class TestCountPhenomena:
    def test_constructed(self):
        text = "[a ( ) (b)\n(c) [d]\ne (f) ((g (h)))"
        inq = parse_inquiry(text, "X", META)
        assert count_phenomena(inq) == PhenomenonCounts(overlap=2, incomprehension=1, hypothesis=3)

    def test_zero(self):
        inq = Inquiry("X", Genre.EF, Quality.GOOD, 0, (UtteranceUnit.from_text("nada"),))
        assert count_phenomena(inq) == (0, 0, 0)
