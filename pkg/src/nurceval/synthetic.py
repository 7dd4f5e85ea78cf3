"""Synthetic annotated corpora for tests and benchmarks.

Units are random Portuguese words, some of them decorated with overlap,
incomprehension, hearing-hypothesis, comment, lengthening and pause marks.
Hypotheses start as the exact normalized reference; ``noisy`` units get word
substitutions, deletions and insertions.
"""

from __future__ import annotations

import random
from pathlib import Path
from typing import Callable, Optional

from .corpus import write_hypotheses, write_manifest
from .normalizer import DEFAULT_CONFIG, normalize_unit
from .transcript import Genre, Inquiry, InquiryMeta, PhenomenonFlags, Quality, UtteranceUnit

VOCABULARY = (
    "que eu não de ele a o um uma casa muito trabalho tem esses problemas "
    "juventude negócios idade né soube certo ciúmes mulher escolhido lá senti "
    "também provocou hoje fui ao mercado gente assim então porque aqui ahn"
).split()


def make_unit_text(rng: random.Random, p_overlap=0.3, p_incomprehension=0.1, p_hypothesis=0.15) -> str:
    words = [rng.choice(VOCABULARY) for _ in range(rng.randint(3, 20))]
    if rng.random() < p_hypothesis:
        i = rng.randrange(len(words))
        words[i] = f"({words[i]})"
    if rng.random() < p_incomprehension:
        words.insert(rng.randrange(len(words) + 1), "( )")
    if rng.random() < 0.1:
        words.insert(rng.randrange(len(words) + 1), "((risos))")
    if rng.random() < 0.1:
        i = rng.randrange(len(words))
        if words[i][-1].isalpha():
            words[i] += "::"
    if rng.random() < 0.1:
        words[-1] += "..."
    if rng.random() < p_overlap:
        # overlap opens before a word and runs to end of unit
        i = rng.randrange(len(words))
        words[i] = "[" + words[i]
    return " ".join(words)


def make_inquiry(inquiry_id: str, n_units: int, rng: random.Random, **rates) -> Inquiry:
    units = tuple(UtteranceUnit.from_text(make_unit_text(rng, **rates), index=i + 1) for i in range(n_units))
    return Inquiry(inquiry_id, Genre.D2, Quality.MIXED, 60 * n_units, units)


def corrupt(tokens, rng: random.Random, rate: float = 0.4) -> list[str]:
    """Word noise; at least one edit is applied to a non-empty input."""
    out: list[str] = []
    edited = False
    for tok in tokens:
        r = rng.random()
        if r < rate / 3:
            out.append(rng.choice(VOCABULARY) + "x")
            edited = True
        elif r < 2 * rate / 3:
            edited = True
        elif r < rate:
            out += [tok, rng.choice(VOCABULARY) + "y"]
            edited = True
        else:
            out.append(tok)
    if tokens and not edited:
        out[0] += "z"
    return out


def make_hypotheses(
    inquiry: Inquiry,
    rng: random.Random,
    noisy: Callable[[PhenomenonFlags], bool] = lambda flags: flags.overlap,
    rate: float = 0.4,
) -> dict[str, str]:
    hyps = {}
    for unit in inquiry.units:
        ref = normalize_unit(unit, DEFAULT_CONFIG)
        if ref.ignored:
            continue
        tokens = list(ref.tokens)
        hyps[unit.id] = " ".join(corrupt(tokens, rng, rate) if noisy(unit.flags) else tokens)
    return hyps


def write_corpus(
    root,
    n_units: int,
    seed: int = 0,
    n_inquiries: int = 10,
    noisy: Optional[Callable[[PhenomenonFlags], bool]] = None,
    rate: float = 0.3,
) -> Path:
    """Write manifest, transcripts and hypothesis files under ``root``.

    Returns the manifest path; hypotheses go to ``root/hyp``.  By default
    every unit gets noise.
    """
    root = Path(root)
    (root / "transcripts").mkdir(parents=True, exist_ok=True)
    (root / "hyp").mkdir(exist_ok=True)
    rng = random.Random(seed)
    genres = list(Genre)
    qualities = list(Quality)
    metas = []
    base, extra = divmod(n_units, n_inquiries)
    for k in range(n_inquiries):
        inquiry_id = f"SYN_{k:03d}"
        inquiry = make_inquiry(inquiry_id, base + (k < extra), rng)
        path = root / "transcripts" / f"{inquiry_id}.txt"
        path.write_text("".join(u.raw + "\n" for u in inquiry.units), encoding="utf-8", newline="\n")
        hyps = make_hypotheses(inquiry, rng, noisy or (lambda flags: True), rate)
        write_hypotheses(hyps, root / "hyp" / f"{inquiry_id}.hyp")
        metas.append(InquiryMeta(inquiry_id, genres[k % 3], qualities[k % 3], inquiry.duration, path.resolve()))
    manifest = root / "manifest.csv"
    write_manifest(metas, manifest, relative_to=root)
    return manifest
