"""Frequency-table truecasing and its inverse.

The model maps each lowercased token to its most frequent surface form in
the training corpus, counted at every position except sentence-initial
(where orthography forces a capital and tells us nothing).  Truecasing
rewrites only the first alphabetic token of a sentence; detruecasing
capitalizes it again after translation.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Sequence

TRUECASE = "truecase"
DETRUECASE = "detruecase"


class TruecaseModelError(ValueError):
    """A model file or casing table is malformed."""


@dataclass(frozen=True)
class TruecaseModel:
    casing_table: dict[str, tuple[str, int]]

    def __post_init__(self) -> None:
        for key, (surface, count) in self.casing_table.items():
            if surface.lower() != key:
                raise TruecaseModelError(
                    f"surface {surface!r} does not lowercase to key {key!r}"
                )
            if count < 1:
                raise TruecaseModelError(f"count for {surface!r} must be positive")

    def surface(self, token: str) -> str | None:
        entry = self.casing_table.get(token.lower())
        return entry[0] if entry else None


def _has_alpha(token: str) -> bool:
    return any(ch.isalpha() for ch in token)


def first_alphabetic(tokens: Sequence[str]) -> int | None:
    """Index of the first token containing a letter, if any."""
    for i, token in enumerate(tokens):
        if _has_alpha(token):
            return i
    return None


def train_truecaser(corpus: Iterable, lang: str = "en") -> TruecaseModel:
    """Count surface forms over tokenized sentences.

    `corpus` yields either whitespace-tokenizable strings or token
    sequences.  Sentence-initial tokens are skipped; ties between surface
    forms break toward the lexicographically smaller one.
    """
    counts: dict[str, dict[str, int]] = {}
    for line in corpus:
        tokens = line.split() if isinstance(line, str) else list(line)
        for position, token in enumerate(tokens):
            if position == 0 or not _has_alpha(token):
                continue
            surfaces = counts.setdefault(token.lower(), {})
            surfaces[token] = surfaces.get(token, 0) + 1
    table = {}
    for key, surfaces in counts.items():
        surface = min(surfaces.items(), key=lambda item: (-item[1], item[0]))[0]
        table[key] = (surface, surfaces[surface])
    return TruecaseModel(table)


def _capitalize(token: str) -> str:
    for i, ch in enumerate(token):
        if ch.isalpha():
            return token[:i] + ch.upper() + token[i + 1:]
    return token


def recase(tokens: Sequence[str], model: TruecaseModel | None, direction: str) -> list[str]:
    """Adjust the casing of the first alphabetic token of one sentence.

    `truecase` rewrites it to its most frequent corpus form (unknown
    tokens pass through); `detruecase` capitalizes its first letter and
    needs no model.
    """
    if direction not in (TRUECASE, DETRUECASE):
        raise ValueError(f"unknown recase direction: {direction!r}")
    out = list(tokens)
    index = first_alphabetic(out)
    if index is None:
        return out
    if direction == TRUECASE:
        if model is None:
            raise TruecaseModelError("truecasing requires a model")
        surface = model.surface(out[index])
        if surface is not None:
            out[index] = surface
    else:
        out[index] = _capitalize(out[index])
    return out


def save_truecaser(model: TruecaseModel, path: str | os.PathLike) -> None:
    """Write "surface_form count" lines, sorted for stable bytes."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("# truecase v1\n")
        for surface, count in sorted(model.casing_table.values()):
            handle.write(f"{surface} {count}\n")


def load_truecaser(path: str | os.PathLike) -> TruecaseModel:
    table: dict[str, tuple[str, int]] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split(" ")
            if len(parts) != 2:
                raise TruecaseModelError(
                    f"{os.fspath(path)}: line {lineno}: expected 'surface count'"
                )
            surface, raw_count = parts
            try:
                count = int(raw_count)
            except ValueError:
                raise TruecaseModelError(
                    f"{os.fspath(path)}: line {lineno}: bad count {raw_count!r}"
                ) from None
            table[surface.lower()] = (surface, count)
    return TruecaseModel(table)
