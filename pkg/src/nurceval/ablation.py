"""Ablation case sets: which utterance units survive phenomenon exclusion.

Case1 keeps every scoreable unit, Case2 drops units with incomprehension or
hearing-hypothesis marks, Case3 drops units with overlapping voices and Case4
drops units with any of the three.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Collection, Iterable, Mapping, Optional

from sklearn.base import BaseEstimator

from .metrics import InquiryScore, ScoreRecord, Totals, score_inquiry
from .normalizer import DEFAULT_CONFIG, NormalizerConfig
from .transcript import Inquiry, PhenomenonFlags


class Case(str, enum.Enum):
    CASE1 = "Case1"
    CASE2 = "Case2"
    CASE3 = "Case3"
    CASE4 = "Case4"


@dataclass(frozen=True)
class CaseSet:
    case: Case
    unit_ids: tuple[str, ...]

    def __contains__(self, unit_id) -> bool:
        return unit_id in self.unit_ids

    def __len__(self) -> int:
        return len(self.unit_ids)


def cases_for(flags: PhenomenonFlags) -> tuple[Case, ...]:
    """The cases a unit with these flags belongs to."""
    out = [Case.CASE1]
    if not (flags.incomprehension or flags.hypothesis):
        out.append(Case.CASE2)
    if not flags.overlap:
        out.append(Case.CASE3)
    if not flags.any:
        out.append(Case.CASE4)
    return tuple(out)


def build_cases(inquiry: Inquiry, ignored: Collection[str] = ()) -> dict[Case, CaseSet]:
    """Split the scoreable units of ``inquiry`` into the four cases.

    ``ignored`` lists unit ids that normalization left empty; they belong to
    no case.
    """
    members: dict[Case, list[str]] = {c: [] for c in Case}
    skip = set(ignored)
    for unit in inquiry.units:
        if unit.id in skip:
            continue
        for case in cases_for(unit.flags):
            members[case].append(unit.id)
    return {c: CaseSet(c, tuple(ids)) for c, ids in members.items()}


def scores_from_records(
    records: Iterable[ScoreRecord], cases: Optional[Mapping[Case, CaseSet]] = None
) -> dict[Case, Totals]:
    """Pool records per case.

    Membership comes from ``cases`` when given, else from each record's flags.
    A case without units has zero totals, whose rates are ``None`` (no data).
    """
    totals = {c: Totals() for c in Case}
    for rec in records:
        if cases is None:
            member_of = cases_for(rec.flags)
        else:
            member_of = [c for c in Case if rec.unit_id in cases[c]]
        for c in member_of:
            totals[c] = totals[c] + rec.totals
    return totals


def case_scores(
    inquiry: Inquiry,
    hypotheses: Mapping[str, str],
    config: NormalizerConfig = DEFAULT_CONFIG,
    **score_kwargs,
) -> dict[Case, Totals]:
    score = score_inquiry(inquiry, hypotheses, config, **score_kwargs)
    return scores_from_records(score.records, build_cases(inquiry, score.ignored))


class AblationAnalyzer(BaseEstimator):
    """Per-inquiry and corpus-wide case scores from already scored inquiries.

    After ``fit`` the estimator exposes ``cases_`` (inquiry id -> case sets),
    ``inquiry_totals_`` (inquiry id -> case -> :class:`Totals`) and
    ``corpus_totals_`` (case -> :class:`Totals`).
    """

    def fit(self, X: Iterable[Inquiry], y: Iterable[InquiryScore]):
        inquiries = list(X)
        scores = {s.inquiry_id: s for s in y}
        self.cases_ = {}
        self.inquiry_totals_ = {}
        corpus = {c: Totals() for c in Case}
        for inq in inquiries:
            score = scores.get(inq.id)
            if score is None:
                raise ValueError(f"no scores for inquiry {inq.id}")
            cases = build_cases(inq, score.ignored)
            per_case = scores_from_records(score.records, cases)
            self.cases_[inq.id] = cases
            self.inquiry_totals_[inq.id] = per_case
            for c in Case:
                corpus[c] = corpus[c] + per_case[c]
        self.corpus_totals_ = corpus
        return self
