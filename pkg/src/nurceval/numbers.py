"""Brazilian Portuguese spelling of cardinal and ordinal numbers.

>>> " ".join(cardinal_words(1234))
'mil duzentos e trinta e quatro'
>>> " ".join(ordinal_words(21, gender="feminine"))
'vigésima primeira'
"""

from __future__ import annotations

from .exceptions import NumberOutOfRange

MAX_CARDINAL = 999_999_999
MAX_ORDINAL = 1000
GENDERS = ("masculine", "feminine")

_UNITS = (
    "zero um dois três quatro cinco seis sete oito nove dez onze doze treze "
    "catorze quinze dezesseis dezessete dezoito dezenove"
).split()
_TENS = dict(zip(range(20, 100, 10), "vinte trinta quarenta cinquenta sessenta setenta oitenta noventa".split()))
_HUNDREDS = dict(
    zip(
        range(100, 1000, 100),
        "cento duzentos trezentos quatrocentos quinhentos seiscentos setecentos oitocentos novecentos".split(),
    )
)

_ORD_UNITS = dict(zip(range(1, 10), "primeiro segundo terceiro quarto quinto sexto sétimo oitavo nono".split()))
_ORD_TENS = dict(
    zip(
        range(10, 100, 10),
        "décimo vigésimo trigésimo quadragésimo quinquagésimo sexagésimo septuagésimo octogésimo nonagésimo".split(),
    )
)
_ORD_HUNDREDS = dict(
    zip(
        range(100, 1000, 100),
        (
            "centésimo ducentésimo trecentésimo quadringentésimo quingentésimo "
            "sexcentésimo septingentésimo octingentésimo noningentésimo"
        ).split(),
    )
)


def _check_gender(gender: str) -> None:
    if gender not in GENDERS:
        raise ValueError(f"gender must be one of {GENDERS}, got {gender!r}")


def _feminine(word: str) -> str:
    if word == "um":
        return "uma"
    if word == "dois":
        return "duas"
    if word.endswith("entos"):  # duzentos -> duzentas
        return word[:-2] + "as"
    return word


def _below_100(n: int) -> list[str]:
    if n < 20:
        return [_UNITS[n]]
    tens, unit = divmod(n, 10)
    words = [_TENS[tens * 10]]
    if unit:
        words += ["e", _UNITS[unit]]
    return words


def _below_1000(n: int, gender: str) -> list[str]:
    if n == 100:
        words = ["cem"]
    elif n < 100:
        words = _below_100(n)
    else:
        hundreds, rest = divmod(n, 100)
        words = [_HUNDREDS[hundreds * 100]]
        if rest:
            words += ["e"] + _below_100(rest)
    if gender == "feminine":
        words = [_feminine(w) for w in words]
    return words


def cardinal_words(n: int, gender: str = "masculine") -> list[str]:
    """Spell ``0 <= n <= 999 999 999`` as a list of words."""
    _check_gender(gender)
    if n < 0 or n > MAX_CARDINAL:
        raise NumberOutOfRange(str(n))
    if n == 0:
        return ["zero"]

    millions, rem = divmod(n, 1_000_000)
    thousands, rest = divmod(rem, 1000)
    # (words, group value) for every non-zero group, largest first
    groups: list[tuple[list[str], int]] = []
    if millions:
        # milhão is a masculine noun whatever is being counted
        words = ["um", "milhão"] if millions == 1 else _below_1000(millions, "masculine") + ["milhões"]
        groups.append((words, millions))
    if thousands:
        words = ["mil"] if thousands == 1 else _below_1000(thousands, gender) + ["mil"]
        groups.append((words, thousands))
    if rest:
        groups.append((_below_1000(rest, gender), rest))

    out: list[str] = []
    for i, (words, value) in enumerate(groups):
        if i and i == len(groups) - 1 and (value < 100 or value % 100 == 0):
            out.append("e")
        out.extend(words)
    return out


def ordinal_words(n: int, gender: str = "masculine") -> list[str]:
    """Spell the ordinal ``1 <= n <= 1000``; feminine swaps the final ``o``."""
    _check_gender(gender)
    if n < 1 or n > MAX_ORDINAL:
        raise ValueError(f"ordinal out of range 1..{MAX_ORDINAL}: {n}")
    if n == 1000:
        words = ["milésimo"]
    else:
        hundreds, rem = divmod(n, 100)
        tens, unit = divmod(rem, 10)
        words = []
        if hundreds:
            words.append(_ORD_HUNDREDS[hundreds * 100])
        if tens:
            words.append(_ORD_TENS[tens * 10])
        if unit:
            words.append(_ORD_UNITS[unit])
    if gender == "feminine":
        words = [w[:-1] + "a" for w in words]
    return words
