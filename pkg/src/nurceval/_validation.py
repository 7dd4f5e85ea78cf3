"""Input validation helpers shared by the estimators and the CLI."""

from __future__ import annotations

import re
from collections.abc import Iterable, Mapping

# Lowercase Portuguese alphabet: a-z plus the Latin-1 range à..ú without '÷'.
TOKEN_RE = re.compile(r"[a-zà-öø-ú]+")


def is_token(word: str) -> bool:
    return TOKEN_RE.fullmatch(word) is not None


def check_text_collection(X, name: str = "X") -> list[str]:
    """Materialize ``X`` as a list of strings.

    A bare string is rejected, since iterating it would silently yield
    characters.
    """
    if isinstance(X, (str, bytes)):
        raise TypeError(f"{name} must be a collection of strings, not a single string")
    if not isinstance(X, Iterable):
        raise TypeError(f"{name} must be iterable, got {type(X).__name__}")
    out = list(X)
    for i, item in enumerate(out):
        if not isinstance(item, str):
            raise TypeError(f"{name}[{i}] is {type(item).__name__}, expected str")
    return out


def check_token_table(table, name: str, *, keys_pattern: re.Pattern | None = None) -> dict[str, str]:
    """Validate a ``str -> str`` table whose values are space-separated tokens."""
    if not isinstance(table, Mapping):
        raise TypeError(f"{name} must be a mapping, got {type(table).__name__}")
    out = {}
    for key, value in table.items():
        if not isinstance(key, str) or not key:
            raise ValueError(f"{name}: keys must be non-empty strings, got {key!r}")
        if keys_pattern is not None and not keys_pattern.fullmatch(key):
            raise ValueError(f"{name}: invalid key {key!r}")
        if not isinstance(value, str) or not value.split() or not all(is_token(w) for w in value.split()):
            raise ValueError(f"{name}[{key!r}]: {value!r} is not a sequence of lowercase tokens")
        out[key] = " ".join(value.split())
    return out
