"""Reference normalization and WER/CER scoring for NURC-convention transcripts."""

__version__ = "0.1.0"

from .ablation import AblationAnalyzer, Case, CaseSet, build_cases, case_scores, scores_from_records
from .metrics import Alignment, InquiryScore, InquiryScorer, ScoreRecord, cer, edit_distance, score_inquiry, wer
from .normalizer import (
    NormalizedText,
    NormalizerConfig,
    NurcNormalizer,
    collapse_spaces,
    normalize_hypothesis,
    normalize_tokens,
    normalize_unit,
    strip_comments,
    strip_marks,
)
from .reporting import Band, ReportSummary, aggregate, emit, load, wer_band
from .transcript import (
    AnnotationSpan,
    Inquiry,
    PhenomenonFlags,
    SpanKind,
    UtteranceUnit,
    count_phenomena,
    detect_spans,
    parse_inquiry,
)

__all__ = [
    "AblationAnalyzer", "Alignment", "AnnotationSpan", "Band", "Case", "CaseSet", "Inquiry",
    "InquiryScore", "InquiryScorer", "NormalizedText", "NormalizerConfig", "NurcNormalizer",
    "PhenomenonFlags", "ReportSummary", "ScoreRecord", "SpanKind", "UtteranceUnit", "aggregate",
    "build_cases", "case_scores", "cer", "collapse_spaces", "count_phenomena", "detect_spans",
    "edit_distance", "emit", "load", "normalize_hypothesis", "normalize_tokens", "normalize_unit",
    "parse_inquiry", "score_inquiry", "scores_from_records", "strip_comments", "strip_marks",
    "wer", "wer_band",
]  # fmt: skip
