import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.exceptions import NotFittedError

from nurceval.exceptions import EmptyReference, UnknownUnitId
from nurceval.metrics import (
    InquiryScorer,
    Op,
    Totals,
    cer,
    distance,
    edit_distance,
    make_record,
    pool,
    score_inquiry,
    wer,
)
from nurceval.normalizer import normalize_unit
from nurceval.transcript import parse_inquiry

from .conftest import GOLDEN_HYPS, GOLDEN_REFS
from .oracles import recursive_distance

META = {"genre": "D2", "quality": "-", "duration": "1:03:32"}
seqs = st.lists(st.sampled_from("abc"), max_size=8)


def random_pairs(n, seed=0):
    rng = random.Random(seed)
    for _ in range(n):
        yield (
            [rng.choice("abc") for _ in range(rng.randint(0, 8))],
            [rng.choice("abc") for _ in range(rng.randint(0, 8))],
        )


class TestEditDistance:
    def test_identity(self):
        al = edit_distance("abc", "abc")
        assert al.distance == 0 and al.hits == 3

    def test_one_deletion(self):
        al = edit_distance(list("abcd"), list("abc"))
        assert (al.distance, al.deletions) == (1, 1)
        assert al.ops[-1] == (Op.DEL, 3, None)

    def test_empty(self):
        assert edit_distance([], []).ops == ()
        assert edit_distance([], ["x"]).insertions == 1

    def test_tie_break_prefers_substitution(self):
        # "ab"->"ba" can be 2 subs or del+ins; subs are preferred
        al = edit_distance("ab", "ba")
        assert (al.substitutions, al.deletions, al.insertions) == (2, 0, 0)

    def test_ops_replay(self):
        a, b = list("kitten"), list("sitting")
        al = edit_distance(a, b)
        rebuilt = [b[j] for op, i, j in al.ops if op is not Op.DEL]
        assert rebuilt == b
        assert [a[i] for op, i, j in al.ops if op is not Op.INS] == a

    def test_matches_recursive_oracle(self):
        for a, b in random_pairs(300, seed=1):
            expected = recursive_distance(a, b)
            assert edit_distance(a, b).distance == expected
            assert distance(a, b) == expected


@settings(max_examples=300, deadline=None)
@given(seqs, seqs)
def test_alignment_accounting(a, b):
    al = edit_distance(a, b)
    assert al.hits + al.substitutions + al.deletions == len(a)
    assert al.hits + al.substitutions + al.insertions == len(b)
    assert al.distance == recursive_distance(a, b)
    assert al.distance == edit_distance(b, a).distance


@settings(max_examples=200, deadline=None)
@given(seqs, seqs, seqs)
def test_triangle_inequality(a, b, c):
    assert distance(a, c) <= distance(a, b) + distance(b, c)


class TestRates:
    @pytest.mark.parametrize("row, model", sorted(GOLDEN_HYPS))
    def test_golden(self, row, model):
        hyp, printed = GOLDEN_HYPS[row, model]
        ref = normalize_unit(GOLDEN_REFS[row][0])
        # printed values are truncated to two decimals
        assert printed <= wer(ref, hyp.split()) < printed + 0.01

    def test_identical(self):
        assert wer(["a", "b"], ["a", "b"]) == 0.0
        assert cer("abc", "abc") == 0.0

    def test_all_deletions(self):
        assert wer(["a", "b", "c", "d"], []) == 1.0

    def test_may_exceed_one(self):
        assert wer(["a"], ["b", "c", "d"]) == 3.0

    def test_cer(self):
        assert cer("ab", "ac") == 0.5

    def test_cer_counts_spaces(self):
        assert cer(["ab", "c"], ["abc"]) == pytest.approx(1 / 4)

    def test_cer_matches_oracle(self):
        for a, b in random_pairs(200, seed=2):
            if not a:
                continue
            ref, hyp = " ".join(a), " ".join(b)
            assert cer(a, b) == recursive_distance(ref, hyp) / len(ref)

    def test_empty_reference(self):
        with pytest.raises(EmptyReference):
            wer([], ["a"])
        with pytest.raises(EmptyReference):
            cer("", "a")


def _rec(uid, ref_len, edits):
    ref = [f"w{i}" for i in range(ref_len)]
    hyp = ["x"] * edits + ref[edits:]
    return make_record("I", uid, ref, hyp)


class TestPooling:
    def test_equal_weights(self):
        t = pool([_rec("1", 4, 2), _rec("2", 4, 0)])
        assert t.pooled_wer == 0.25 and t.macro_wer == 0.25

    def test_unequal_weights(self):
        t = pool([_rec("1", 1, 1), _rec("2", 9, 0)])
        assert t.pooled_wer == pytest.approx(0.1)
        assert t.macro_wer == pytest.approx(0.5)

    def test_single_unit(self):
        t = pool([_rec("1", 5, 2)])
        assert t.pooled_wer == t.macro_wer == 0.4

    def test_empty_totals(self):
        assert Totals().pooled_wer is None and Totals().macro_cer is None

    def test_merge_is_order_independent(self):
        recs = [_rec(str(i), n, e) for i, (n, e) in enumerate([(3, 1), (5, 0), (2, 2), (7, 3)])]
        a = pool(recs)
        b = pool(reversed(recs))
        assert (a.word_edits, a.ref_tokens, a.char_edits, a.ref_chars) == (b.word_edits, b.ref_tokens, b.char_edits, b.ref_chars)
        assert a.wer_sum == pytest.approx(b.wer_sum)


class TestScoreInquiry:
    def inquiry(self):
        return parse_inquiry("a b c d\n((risos))\n[e f\n(g) h", "I", META)

    def test_records_and_ignored(self):
        score = score_inquiry(self.inquiry(), {"1": "a b c d", "3": "e x", "4": "g h"})
        assert [r.unit_id for r in score.records] == ["1", "3", "4"]
        assert score.ignored == ("2",)
        assert score.pooled_wer == pytest.approx(1 / 8)
        assert score.records[1].flags.overlap

    def test_missing_hypothesis_scores_as_deletions(self):
        score = score_inquiry(self.inquiry(), {"1": "a b c d"})
        assert score.missing == ("3", "4")
        assert [r.wer for r in score.records] == [0.0, 1.0, 1.0]
        assert score.records[1].missing_hypothesis

    def test_unknown_unit(self):
        with pytest.raises(UnknownUnitId):
            score_inquiry(self.inquiry(), {"99": "x"})

    def test_hypotheses_are_normalized(self):
        inq = parse_inquiry("vinte e cinco", "I", META)
        assert score_inquiry(inq, {"1": "25"}).pooled_wer == 0.0
        assert score_inquiry(inq, {"1": "25"}, normalize_hypotheses=False).pooled_wer == 1.0

    def test_golden_pair(self):
        inq = parse_inquiry(GOLDEN_REFS[0][0], "SP_D2_360", META)
        score = score_inquiry(inq, {"1": GOLDEN_HYPS[0, "grosman"][0]})
        assert score.pooled_wer == pytest.approx(8 / 18)


class TestScorerEstimator:
    def test_fit_transform(self):
        inq = parse_inquiry("a b\nc", "I", META)
        scorer = InquiryScorer(run="m1").fit([inq])
        [score] = scorer.transform({"I": {"1": "a b", "2": "x"}})
        assert score.pooled_wer == pytest.approx(1 / 3)
        assert {r.run for r in score.records} == {"m1"}

    def test_absent_inquiry_scores_empty(self):
        inq = parse_inquiry("a b", "I", META)
        [score] = InquiryScorer().fit([inq]).transform({})
        assert score.pooled_wer == 1.0

    def test_not_fitted(self):
        with pytest.raises(NotFittedError):
            InquiryScorer().transform({})

    def test_unknown_inquiry(self):
        inq = parse_inquiry("a", "I", META)
        with pytest.raises(ValueError):
            InquiryScorer().fit([inq]).transform({"J": {}})
