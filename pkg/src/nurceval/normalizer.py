"""Turn annotated utterance units into clean reference token sequences.

The pipeline runs five steps in a fixed order:

1. drop ``((comments))`` with their content;
2. drop transcription marks (brackets, parentheses, ``::``, ``...``, ``?`` ...),
   keeping hypothesis content and dropping ``( )`` entirely;
3. collapse whitespace;
4. lowercase, canonicalize filled pauses, split hyphens, spell out numbers and
   acronyms, delete characters outside the alphabet;
5. flag units left without tokens as ignored.

ASR hypotheses carry no NURC marks and only go through steps 3 and 4.
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Union

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_text_collection, check_token_table, is_token
from .exceptions import NumberOutOfRange
from .numbers import GENDERS, MAX_ORDINAL, cardinal_words, ordinal_words
from .transcript import SpanKind, UtteranceUnit, scan

# Provisional: the inventory of filled pauses is not fixed by the conventions.
DEFAULT_FILLED_PAUSES = {
    "éh": "eh",
    "ahn": "ahn",
    "uhn": "uhn",
    "ah": "ah",
    "mhm": "mhm",
}

DEFAULT_LETTER_NAMES = {
    "a": "á", "b": "bê", "c": "cê", "d": "dê", "e": "é", "f": "efe", "g": "gê",
    "h": "agá", "i": "i", "j": "jota", "k": "cá", "l": "ele", "m": "eme",
    "n": "ene", "o": "ó", "p": "pê", "q": "quê", "r": "erre", "s": "esse",
    "t": "tê", "u": "u", "v": "vê", "w": "dáblio", "x": "xis", "y": "ípsilon",
    "z": "zê",
}  # fmt: skip

_LETTER_KEY = re.compile(r"[a-z]")
_ACRONYM_KEY = re.compile(r"[A-Z][A-Z.]*")


@dataclass(frozen=True)
class NormalizerConfig:
    filled_pauses: Mapping[str, str] = field(default_factory=lambda: dict(DEFAULT_FILLED_PAUSES))
    letter_names: Mapping[str, str] = field(default_factory=lambda: dict(DEFAULT_LETTER_NAMES))
    gender: str = "masculine"
    acronyms: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        fp = check_token_table(self.filled_pauses, "filled_pauses")
        for variant, canonical in fp.items():
            if " " in canonical or fp.get(canonical, canonical) != canonical:
                raise ValueError(f"filled_pauses: canonical form {canonical!r} of {variant!r} is not a fixed point")
        letters = check_token_table(self.letter_names, "letter_names", keys_pattern=_LETTER_KEY)
        missing = sorted(set("abcdefghijklmnopqrstuvwxyz") - set(letters))
        if missing:
            raise ValueError(f"letter_names: missing letters {''.join(missing)}")
        acronyms = check_token_table(self.acronyms, "acronyms", keys_pattern=_ACRONYM_KEY)
        if self.gender not in GENDERS:
            raise ValueError(f"gender must be one of {GENDERS}, got {self.gender!r}")
        object.__setattr__(self, "filled_pauses", fp)
        object.__setattr__(self, "letter_names", letters)
        object.__setattr__(self, "acronyms", acronyms)

    def to_dict(self) -> dict:
        return {
            "filled_pauses": dict(sorted(self.filled_pauses.items())),
            "letter_names": dict(sorted(self.letter_names.items())),
            "gender": self.gender,
            "acronyms": dict(sorted(self.acronyms.items())),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "NormalizerConfig":
        """Overlay ``data`` on the defaults; tables are merged key by key."""
        unknown = set(data) - {"filled_pauses", "letter_names", "gender", "acronyms"}
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(
            filled_pauses={**DEFAULT_FILLED_PAUSES, **data.get("filled_pauses", {})},
            letter_names={**DEFAULT_LETTER_NAMES, **data.get("letter_names", {})},
            gender=data.get("gender", "masculine"),
            acronyms=dict(data.get("acronyms", {})),
        )

    @classmethod
    def from_file(cls, path) -> "NormalizerConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2, sort_keys=True) + "\n"

    def fingerprint(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True)


DEFAULT_CONFIG = NormalizerConfig()


@dataclass(frozen=True)
class NormalizedText:
    tokens: tuple[str, ...]
    trace: tuple[int, ...] = ()
    diagnostics: tuple[str, ...] = ()
    review: bool = False

    @property
    def ignored(self) -> bool:
        return not self.tokens

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


# -- step 1 -----------------------------------------------------------------


def strip_comments(raw: str) -> str:
    """Remove every ``((...))`` span, content included."""
    spans, _ = scan(raw)
    comments = [s for s in spans if s.kind is SpanKind.COMMENT]
    if not comments:
        return raw
    pieces, pos = [], 0
    for s in comments:
        pieces.append(raw[pos : s.start])
        pos = s.end
    pieces.append(raw[pos:])
    return "".join(pieces)


# -- step 2 -----------------------------------------------------------------

_INCOMPREHENSION = re.compile(r"\(\s*\)")
_MARKS = re.compile(r"[()\[\]:?,;\"“”‘’«»…]|\.{2,}")


def strip_marks(text: str) -> str:
    """Remove transcription marks and punctuation; ``( )`` leaves nothing."""
    return _MARKS.sub("", _INCOMPREHENSION.sub("", text))


# -- step 3 -----------------------------------------------------------------


def collapse_spaces(text: str) -> str:
    return " ".join(text.split())


# -- step 4 -----------------------------------------------------------------

_HYPHENS = re.compile(r"[-‐‑‒–—]")
# a number (optionally with '.' thousands separators and an ordinal suffix)
# or a run of non-digits
_PIECE = re.compile(
    r"(?P<num>\d{1,3}(?:\.\d{3})+|\d+)(?P<suffix>[ºª°]|[oa](?![^\W\d_]))?|(?P<text>\D+)"
)
_DOTTED_ACRONYM = re.compile(r"(?:[A-Z]\.)+[A-Z]\.?")
_CAPS = re.compile(r"[A-Z]{2,}")
_VOWELS = set("AEIOU")
_EDGE_PUNCT = re.compile(r"^[^\w]+|[^\w]+$")


def _fold_char(ch: str) -> str:
    if is_token(ch):
        return ch
    base = unicodedata.normalize("NFD", ch)[0]
    return base if "a" <= base <= "z" else ""


def _plain_word(word: str, config: NormalizerConfig) -> list[str]:
    word = "".join(_fold_char(c) for c in word.lower())
    if not word:
        return []
    return [config.filled_pauses.get(word, word)]


def _spell(letters: str, config: NormalizerConfig) -> list[str]:
    out = []
    for ch in letters:
        out.extend(config.letter_names[ch.lower()].split())
    return out


def _text_piece(piece: str, config: NormalizerConfig) -> list[str]:
    core = _EDGE_PUNCT.sub("", piece)
    if core in config.acronyms:
        return config.acronyms[core].split()
    if _DOTTED_ACRONYM.fullmatch(core):
        return _spell(core.replace(".", ""), config)
    if _CAPS.fullmatch(core) and not (_VOWELS & set(core)):
        return _spell(core, config)
    # all-caps words with vowels are emphasis (``VI``, ``NÃO``), not acronyms
    return _plain_word(piece, config)


def _number_piece(digits: str, suffix: Optional[str], config: NormalizerConfig, diags: list[str]) -> list[str]:
    value = int(digits.replace(".", ""))
    if suffix:
        gender = "feminine" if suffix in "ªa" else "masculine"
        if 1 <= value <= MAX_ORDINAL:
            return ordinal_words(value, gender)
        diags.append(f"ordinal {digits}{suffix} outside 1..{MAX_ORDINAL}, spelled as cardinal")
        return cardinal_words(value, config.gender)
    return cardinal_words(value, config.gender)


def normalize_tokens(text: str, config: NormalizerConfig = DEFAULT_CONFIG) -> NormalizedText:
    """Step 4: map marked-free text to lowercase alphabet tokens.

    Raises :class:`NumberOutOfRange` for numbers of ten or more digits.
    """
    tokens: list[str] = []
    diags: list[str] = []
    for word in _HYPHENS.sub(" ", text).split():
        for m in _PIECE.finditer(word):
            if m.group("num") is not None:
                tokens.extend(_number_piece(m.group("num"), m.group("suffix"), config, diags))
            else:
                tokens.extend(_text_piece(m.group("text"), config))
    return NormalizedText(tuple(tokens), (4,), tuple(diags))


# -- pipeline ---------------------------------------------------------------


def normalize_unit(unit: Union[UtteranceUnit, str], config: NormalizerConfig = DEFAULT_CONFIG) -> NormalizedText:
    """Run steps 1-5 on a unit (or its raw text).

    The result has no tokens when the unit must be ignored; units with a number
    too large to spell are ignored as well and flagged with ``review=True``.
    """
    raw = unit.raw if isinstance(unit, UtteranceUnit) else unit
    trace = []
    text = raw
    for step, fn in ((1, strip_comments), (2, strip_marks), (3, collapse_spaces)):
        new = fn(text)
        if new != text:
            trace.append(step)
        text = new
    try:
        result = normalize_tokens(text, config)
    except NumberOutOfRange as exc:
        return NormalizedText((), tuple(trace + [4, 5]), (f"number out of range: {exc.digits}",), review=True)
    if result.text != text:
        trace.append(4)
    if not result.tokens:
        trace.append(5)
    return NormalizedText(result.tokens, tuple(trace), result.diagnostics)


def normalize_hypothesis(text: str, config: NormalizerConfig = DEFAULT_CONFIG) -> NormalizedText:
    """Steps 3-4 for ASR output; over-long numbers are read digit by digit."""
    text = collapse_spaces(text)
    try:
        return normalize_tokens(text, config)
    except NumberOutOfRange:
        spaced = re.sub(r"\d{10,}", lambda m: " ".join(m.group()), text)
        result = normalize_tokens(spaced, config)
        return NormalizedText(result.tokens, result.trace, result.diagnostics + ("long number read digit by digit",))


class NurcNormalizer(TransformerMixin, BaseEstimator):
    """Scikit-learn transformer mapping raw strings to normalized strings.

    ``transform`` returns the space-joined tokens of each input; ignored units
    come out as ``""``.

    Parameters
    ----------
    filled_pauses, letter_names, acronyms : dict, optional
        Overrides merged onto the default tables.
    gender : {"masculine", "feminine"}
        Gender used when spelling cardinals.
    kind : {"reference", "hypothesis"}
        ``"reference"`` runs the full pipeline on annotated transcripts;
        ``"hypothesis"`` only collapses spaces and normalizes tokens.
    """

    def __init__(self, filled_pauses=None, letter_names=None, acronyms=None, gender="masculine", kind="reference"):
        self.filled_pauses = filled_pauses
        self.letter_names = letter_names
        self.acronyms = acronyms
        self.gender = gender
        self.kind = kind

    @classmethod
    def from_config(cls, config: NormalizerConfig, kind: str = "reference") -> "NurcNormalizer":
        return cls(
            filled_pauses=dict(config.filled_pauses),
            letter_names=dict(config.letter_names),
            acronyms=dict(config.acronyms),
            gender=config.gender,
            kind=kind,
        ).fit()

    def fit(self, X=None, y=None):
        if self.kind not in ("reference", "hypothesis"):
            raise ValueError(f"kind must be 'reference' or 'hypothesis', got {self.kind!r}")
        self.config_ = NormalizerConfig.from_dict(
            {
                "filled_pauses": self.filled_pauses or {},
                "letter_names": self.letter_names or {},
                "acronyms": self.acronyms or {},
                "gender": self.gender,
            }
        )
        return self

    def normalize(self, raw: str) -> NormalizedText:
        check_is_fitted(self, "config_")
        if self.kind == "hypothesis":
            return normalize_hypothesis(raw, self.config_)
        return normalize_unit(raw, self.config_)

    def transform(self, X):
        X = check_text_collection(X)
        return [self.normalize(x).text for x in X]


def load_config(path: Optional[Union[str, Path]]) -> NormalizerConfig:
    return DEFAULT_CONFIG if path is None else NormalizerConfig.from_file(path)
