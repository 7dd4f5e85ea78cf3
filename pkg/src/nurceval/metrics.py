"""Levenshtein alignment, WER/CER and per-inquiry scoring."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

from rapidfuzz.distance import Levenshtein as _rf
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .exceptions import EmptyReference, InvariantViolation, UnknownUnitId
from .normalizer import DEFAULT_CONFIG, NormalizedText, NormalizerConfig, normalize_hypothesis, normalize_unit
from .transcript import Inquiry, PhenomenonCounts, PhenomenonFlags

TokenLike = Union[NormalizedText, Sequence[str], str]


class Op(str, enum.Enum):
    HIT = "hit"
    SUB = "sub"
    DEL = "del"
    INS = "ins"


@dataclass(frozen=True)
class Alignment:
    hits: int
    substitutions: int
    deletions: int
    insertions: int
    # (op, ref index, hyp index); the index is None on the side an op skips
    ops: tuple[tuple[Op, Optional[int], Optional[int]], ...] = ()

    @property
    def distance(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    @property
    def ref_len(self) -> int:
        return self.hits + self.substitutions + self.deletions

    @property
    def hyp_len(self) -> int:
        return self.hits + self.substitutions + self.insertions


def edit_distance(a: Sequence, b: Sequence) -> Alignment:
    """Minimal unit-cost alignment of ``a`` (reference) to ``b`` (hypothesis).

    Among optimal alignments the backtrace prefers, at every cell, a hit, then
    a substitution, then a deletion, then an insertion.
    """
    n, m = len(a), len(b)
    # dist[i][j]: distance between a[:i] and b[:j]
    dist = [list(range(m + 1))]
    for i in range(1, n + 1):
        row = [i] + [0] * m
        prev = dist[i - 1]
        ai = a[i - 1]
        for j in range(1, m + 1):
            if ai == b[j - 1]:
                row[j] = prev[j - 1]
            else:
                row[j] = 1 + min(prev[j - 1], prev[j], row[j - 1])
        dist.append(row)

    ops = []
    counts = dict.fromkeys(Op, 0)
    i, j = n, m
    while i or j:
        d = dist[i][j]
        if i and j and a[i - 1] == b[j - 1] and dist[i - 1][j - 1] == d:
            op = Op.HIT
        elif i and j and dist[i - 1][j - 1] + 1 == d:
            op = Op.SUB
        elif i and dist[i - 1][j] + 1 == d:
            op = Op.DEL
        else:
            op = Op.INS
        if op is Op.DEL:
            ops.append((op, i - 1, None))
            i -= 1
        elif op is Op.INS:
            ops.append((op, None, j - 1))
            j -= 1
        else:
            ops.append((op, i - 1, j - 1))
            i -= 1
            j -= 1
        counts[op] += 1
    ops.reverse()
    return Alignment(counts[Op.HIT], counts[Op.SUB], counts[Op.DEL], counts[Op.INS], tuple(ops))


def distance(a: Sequence, b: Sequence) -> int:
    """Unit-cost Levenshtein distance (no alignment, compiled backend)."""
    return _rf.distance(a, b)


def _tokens(x: TokenLike) -> Sequence[str]:
    if isinstance(x, NormalizedText):
        return x.tokens
    if isinstance(x, str):
        return x.split()
    return x


def _chars(x: TokenLike) -> str:
    if isinstance(x, str):
        return " ".join(x.split())
    return " ".join(_tokens(x))


def wer(reference: TokenLike, hypothesis: TokenLike) -> float:
    """(S + D + I) / reference length; may exceed 1."""
    ref = _tokens(reference)
    if not ref:
        raise EmptyReference("WER is undefined for an empty reference")
    return _rf.distance(ref, _tokens(hypothesis)) / len(ref)


def cer(reference: TokenLike, hypothesis: TokenLike) -> float:
    """Character edit distance over space-joined tokens, spaces included."""
    ref = _chars(reference)
    if not ref:
        raise EmptyReference("CER is undefined for an empty reference")
    return _rf.distance(ref, _chars(hypothesis)) / len(ref)


@dataclass(frozen=True)
class Totals:
    """Additive error counts; merging is associative and commutative."""

    units: int = 0
    word_edits: int = 0
    ref_tokens: int = 0
    char_edits: int = 0
    ref_chars: int = 0
    wer_sum: float = 0.0
    cer_sum: float = 0.0

    def __add__(self, other: "Totals") -> "Totals":
        return Totals(
            self.units + other.units,
            self.word_edits + other.word_edits,
            self.ref_tokens + other.ref_tokens,
            self.char_edits + other.char_edits,
            self.ref_chars + other.ref_chars,
            self.wer_sum + other.wer_sum,
            self.cer_sum + other.cer_sum,
        )

    @property
    def pooled_wer(self) -> Optional[float]:
        return self.word_edits / self.ref_tokens if self.ref_tokens else None

    @property
    def pooled_cer(self) -> Optional[float]:
        return self.char_edits / self.ref_chars if self.ref_chars else None

    @property
    def macro_wer(self) -> Optional[float]:
        return self.wer_sum / self.units if self.units else None

    @property
    def macro_cer(self) -> Optional[float]:
        return self.cer_sum / self.units if self.units else None


@dataclass(frozen=True)
class ScoreRecord:
    inquiry_id: str
    unit_id: str
    ref: tuple[str, ...]
    hyp: tuple[str, ...]
    alignment: Alignment
    char_edits: int
    flags: PhenomenonFlags = PhenomenonFlags()
    phenomena: PhenomenonCounts = PhenomenonCounts()
    missing_hypothesis: bool = False
    run: str = ""

    @property
    def ref_len(self) -> int:
        return len(self.ref)

    @property
    def hyp_len(self) -> int:
        return len(self.hyp)

    @property
    def ref_chars(self) -> int:
        return len(" ".join(self.ref))

    @property
    def word_edits(self) -> int:
        return self.alignment.distance

    @property
    def wer(self) -> float:
        return self.word_edits / self.ref_len

    @property
    def cer(self) -> float:
        return self.char_edits / self.ref_chars

    @property
    def totals(self) -> Totals:
        return Totals(1, self.word_edits, self.ref_len, self.char_edits, self.ref_chars, self.wer, self.cer)


def make_record(
    inquiry_id: str,
    unit_id: str,
    ref: Sequence[str],
    hyp: Sequence[str],
    *,
    flags: PhenomenonFlags = PhenomenonFlags(),
    phenomena: PhenomenonCounts = PhenomenonCounts(),
    missing_hypothesis: bool = False,
    run: str = "",
) -> ScoreRecord:
    """Align one unit and check the accounting identities of the result."""
    ref, hyp = tuple(ref), tuple(hyp)
    if not ref:
        raise EmptyReference(f"{inquiry_id}/{unit_id}: empty reference must be ignored upstream")
    alignment = edit_distance(ref, hyp)
    if alignment.ref_len != len(ref) or alignment.hyp_len != len(hyp) or alignment.distance != distance(ref, hyp):
        raise InvariantViolation(f"{inquiry_id}/{unit_id}: inconsistent alignment {alignment}")
    char_edits = _rf.distance(" ".join(ref), " ".join(hyp))
    return ScoreRecord(inquiry_id, unit_id, ref, hyp, alignment, char_edits, flags, phenomena, missing_hypothesis, run)


def pool(records: Iterable[ScoreRecord]) -> Totals:
    total = Totals()
    for r in records:
        total = total + r.totals
    return total


@dataclass(frozen=True)
class InquiryScore:
    inquiry_id: str
    records: tuple[ScoreRecord, ...]
    ignored: tuple[str, ...] = ()
    review: tuple[str, ...] = ()
    missing: tuple[str, ...] = ()
    totals: Totals = field(default_factory=Totals)

    @property
    def pooled_wer(self) -> Optional[float]:
        return self.totals.pooled_wer

    @property
    def macro_wer(self) -> Optional[float]:
        return self.totals.macro_wer

    @property
    def pooled_cer(self) -> Optional[float]:
        return self.totals.pooled_cer

    @property
    def macro_cer(self) -> Optional[float]:
        return self.totals.macro_cer


def normalize_references(inquiry: Inquiry, config: NormalizerConfig = DEFAULT_CONFIG) -> dict[str, NormalizedText]:
    return {u.id: normalize_unit(u, config) for u in inquiry.units}


def score_inquiry(
    inquiry: Inquiry,
    hypotheses: Mapping[str, str],
    config: NormalizerConfig = DEFAULT_CONFIG,
    *,
    normalize_hypotheses: bool = True,
    references: Optional[Mapping[str, NormalizedText]] = None,
    run: str = "",
) -> InquiryScore:
    """Score every non-ignored unit of ``inquiry`` against its hypothesis.

    Units without a hypothesis are scored against an empty one and listed in
    ``missing``.  ``references`` may carry precomputed normalized references.
    """
    known = {u.id for u in inquiry.units}
    unknown = set(hypotheses) - known
    if unknown:
        raise UnknownUnitId(inquiry.id, unknown)
    if references is None:
        references = normalize_references(inquiry, config)

    records, ignored, review, missing = [], [], [], []
    for unit in inquiry.units:
        ref = references[unit.id]
        if ref.ignored:
            ignored.append(unit.id)
            if ref.review:
                review.append(unit.id)
            continue
        text = hypotheses.get(unit.id)
        if text is None:
            missing.append(unit.id)
            hyp: Sequence[str] = ()
        elif normalize_hypotheses:
            hyp = normalize_hypothesis(text, config).tokens
        else:
            hyp = text.split()
        records.append(
            make_record(
                inquiry.id,
                unit.id,
                ref.tokens,
                hyp,
                flags=unit.flags,
                phenomena=unit.span_counts(),
                missing_hypothesis=text is None,
                run=run,
            )
        )
    return InquiryScore(inquiry.id, tuple(records), tuple(ignored), tuple(review), tuple(missing), pool(records))


class InquiryScorer(TransformerMixin, BaseEstimator):
    """Normalize references once in ``fit``, score hypothesis sets in ``transform``.

    ``transform`` takes a mapping ``inquiry id -> {unit id: hypothesis}`` and
    returns one :class:`InquiryScore` per fitted inquiry, in fit order.
    Inquiries absent from the mapping are scored against empty hypotheses.
    """

    def __init__(self, config=None, normalize_hypotheses=True, run=""):
        self.config = config
        self.normalize_hypotheses = normalize_hypotheses
        self.run = run

    def fit(self, X, y=None):
        config = self.config if self.config is not None else DEFAULT_CONFIG
        if not isinstance(config, NormalizerConfig):
            raise TypeError("config must be a NormalizerConfig")
        inquiries = list(X)
        for inq in inquiries:
            if not isinstance(inq, Inquiry):
                raise TypeError(f"expected Inquiry, got {type(inq).__name__}")
        ids = [inq.id for inq in inquiries]
        if len(set(ids)) != len(ids):
            raise ValueError("inquiry ids must be unique")
        self.config_ = config
        self.inquiries_ = inquiries
        self.references_ = {inq.id: normalize_references(inq, config) for inq in inquiries}
        return self

    def transform(self, X):
        check_is_fitted(self, "references_")
        if not isinstance(X, Mapping):
            raise TypeError("hypotheses must be a mapping of inquiry id to {unit id: text}")
        stray = set(X) - set(self.references_)
        if stray:
            raise ValueError(f"hypotheses for unfitted inquiries: {sorted(stray)}")
        return [
            score_inquiry(
                inq,
                X.get(inq.id, {}),
                self.config_,
                normalize_hypotheses=self.normalize_hypotheses,
                references=self.references_[inq.id],
                run=self.run,
            )
            for inq in self.inquiries_
        ]
