import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from nurceval._validation import TOKEN_RE
from nurceval.normalizer import (
    DEFAULT_CONFIG,
    NormalizerConfig,
    NurcNormalizer,
    collapse_spaces,
    normalize_hypothesis,
    normalize_tokens,
    normalize_unit,
    strip_comments,
    strip_marks,
)
from nurceval.transcript import UtteranceUnit

from .conftest import GOLDEN_REFS
from .fuzz import fuzz_unit


@pytest.mark.parametrize(
    "raw, expected",
    [
        ("hoje fui ((risos)) ao mercado", "hoje fui  ao mercado"),
        ("((tosse))", ""),
        ("a ((x)) b ((y)) c", "a  b  c"),
        ("((a (b) c)) d", " d"),
        ("sem comentário", "sem comentário"),
    ],
)
def test_strip_comments(raw, expected):
    assert strip_comments(raw) == expected


@pytest.mark.parametrize(
    "text, expected",
    [
        ("isso eu (não) soube né eu VI...", "isso eu não soube né eu VI"),
        ("[( ) (não está muito na idade né?", " não está muito na idade né"),
        ("ter:: éh", "ter éh"),
        ('a, b; "c"', "a b c"),
    ],
)
def test_strip_marks(text, expected):
    assert strip_marks(text) == expected


@pytest.mark.parametrize("text, expected", [("hoje     fui ao mercado", "hoje fui ao mercado"), ("  a  ", "a"), ("", "")])
def test_collapse_spaces(text, expected):
    assert collapse_spaces(text) == expected


@pytest.mark.parametrize(
    "text, tokens",
    [
        ("juvenTUde", ["juventude"]),
        ("25", ["vinte", "e", "cinco"]),
        ("guarda-chuva", ["guarda", "chuva"]),
        ("éh ahn", ["eh", "ahn"]),
        ("eu VI lá", ["eu", "vi", "lá"]),
        ("NÃO", ["não"]),
        ("TV", ["tê", "vê"]),
        ("U.S.P.", ["u", "esse", "pê"]),
        ("2º 3ª 2a 1o", ["segundo", "terceira", "segunda", "primeiro"]),
        ("20anos", ["vinte", "anos"]),
        ("abc2", ["abc", "dois"]),
        ("1.000", ["mil"]),
        ("über", ["uber"]),
        ("d'água!", ["dágua"]),
        ("1500º", ["mil", "e", "quinhentos"]),
    ],
)
def test_normalize_tokens(text, tokens):
    assert list(normalize_tokens(text).tokens) == tokens


def test_feminine_config():
    cfg = NormalizerConfig.from_dict({"gender": "feminine"})
    assert normalize_tokens("2", cfg).tokens == ("duas",)


def test_acronym_table():
    cfg = NormalizerConfig.from_dict({"acronyms": {"USP": "universidade de são paulo"}})
    assert normalize_tokens("a USP", cfg).tokens == ("a", "universidade", "de", "são", "paulo")


class TestNormalizeUnit:
    def test_comment_only_is_ignored(self):
        result = normalize_unit(UtteranceUnit.from_text("((risos))"))
        assert result.ignored and result.tokens == () and 5 in result.trace

    @pytest.mark.parametrize("raw, count", GOLDEN_REFS)
    def test_golden_token_counts(self, raw, count):
        assert len(normalize_unit(raw).tokens) == count

    def test_golden_row1_tokens(self):
        assert normalize_unit(GOLDEN_REFS[0][0]).text == (
            "e dão muito trabalho tem esses esses problemas de juventude esses negócios não está muito na idade né"
        )

    def test_out_of_range_number_is_flagged_and_ignored(self):
        result = normalize_unit("custou 1000000000 reais")
        assert result.ignored and result.review
        assert "1000000000" in result.diagnostics[0]

    def test_step_order(self):
        # stripping marks first would leak "a b c" out of the comment
        assert normalize_unit("((a (b) c)) d").tokens == ("d",)
        assert normalize_tokens(collapse_spaces(strip_marks("((a (b) c)) d"))).tokens == ("a", "b", "c", "d")

    def test_trace(self):
        assert normalize_unit("a  ((x)) b").trace == (1, 3)
        assert normalize_unit("casa").trace == ()


def test_hypothesis_normalization_keeps_marks_out_of_scope():
    # only spaces and tokens are normalized; parentheses are simply deleted
    assert normalize_hypothesis("  Olá, (mundo)  25").tokens == ("olá", "mundo", "vinte", "e", "cinco")
    assert normalize_hypothesis("1234567890").tokens == tuple("um dois três quatro cinco seis sete oito nove zero".split())


def test_config_validation():
    with pytest.raises(ValueError):
        NormalizerConfig(filled_pauses={"éh": "Eh!"})
    with pytest.raises(ValueError):
        NormalizerConfig(filled_pauses={"éh": "eh", "eh": "ê"})
    with pytest.raises(ValueError):
        NormalizerConfig(letter_names={"a": "á"})
    with pytest.raises(ValueError):
        NormalizerConfig.from_dict({"colour": "blue"})


def test_config_file_round_trip(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(DEFAULT_CONFIG.dumps(), encoding="utf-8")
    assert NormalizerConfig.from_file(path) == DEFAULT_CONFIG


@pytest.mark.parametrize("seed", range(5))
def test_fuzz_purity_and_idempotence(seed):
    rng = random.Random(seed)
    for _ in range(300):
        raw = fuzz_unit(rng)
        out = normalize_unit(raw)
        assert all(TOKEN_RE.fullmatch(t) for t in out.tokens), raw
        if not out.ignored:
            assert normalize_unit(out.text).tokens == out.tokens, raw


plain_words = st.lists(st.sampled_from(["casa", "Pão", "é", "NÃO", "a", "ciúmes", "VI", "(x)", "[y", "z::", "w..."]), max_size=10)


@settings(max_examples=200, deadline=None)
@given(plain_words)
def test_order_and_count_without_expansions(words):
    raw = " ".join(words)
    tokens = normalize_unit(raw).tokens
    assert len(tokens) <= len(raw.split())
    # tokens keep the order of their source words
    expected = [w.lower().strip("()[:.") for w in words]
    assert list(tokens) == [w for w in expected if w]


class TestEstimator:
    def test_transform(self):
        norm = NurcNormalizer().fit()
        assert norm.transform(["hoje ((risos)) fui", "((tosse))"]) == ["hoje fui", ""]

    def test_hypothesis_kind(self):
        norm = NurcNormalizer(kind="hypothesis").fit()
        assert norm.transform(["a ((b))"]) == ["a b"]

    def test_params_and_clone(self):
        norm = NurcNormalizer(gender="feminine")
        assert norm.get_params()["gender"] == "feminine"
        twin = clone(norm).fit()
        assert twin.transform(["2"]) == ["duas"]

    def test_not_fitted(self):
        with pytest.raises(NotFittedError):
            NurcNormalizer().transform(["a"])

    def test_rejects_bare_string(self):
        with pytest.raises(TypeError):
            NurcNormalizer().fit().transform("abc")

    def test_bad_kind(self):
        with pytest.raises(ValueError):
            NurcNormalizer(kind="other").fit()

    def test_fit_transform(self):
        assert NurcNormalizer().fit_transform(["A-B"]) == ["a b"]
