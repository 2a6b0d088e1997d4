"""Byte-pair-encoding subword segmentation with exact reversal.

One model is learned jointly over both sides of a language pair.  Words
are built from characters with an end-of-word marker on the final one;
the most frequent adjacent symbol pair is merged repeatedly, ties broken
by the lexicographically smaller pair so learning is reproducible.
Applied text marks non-final units with the "@@" continuation suffix and
undo_bpe strips them back out.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from ._kernels import apply_merges, count_adjacent_pairs
from .markers import BPE_SEPARATOR, contains_placeholder

END_OF_WORD = "</w>"

MODEL_HEADER_PREFIX = "#bpe v1 separator="


class BpeTrainingError(ValueError):
    """The corpus cannot produce a model."""


class BpeModelError(ValueError):
    """A model file is malformed."""


@dataclass
class BpeModel:
    merges: tuple[tuple[str, str], ...]
    separator: str = BPE_SEPARATOR

    def __post_init__(self) -> None:
        self.merges = tuple(tuple(pair) for pair in self.merges)
        if len(set(self.merges)) != len(self.merges):
            raise BpeModelError("merge list contains duplicate pairs")

    @property
    def num_merges(self) -> int:
        return len(self.merges)

    @cached_property
    def _ranks(self) -> dict[tuple[str, str], int]:
        return {pair: rank for rank, pair in enumerate(self.merges)}

    @cached_property
    def _word_cache(self) -> dict[str, list[str]]:
        return {}


def _word_symbols(word: str) -> tuple[str, ...]:
    return tuple(word[:-1]) + (word[-1] + END_OF_WORD,)


def _normalize_corpora(corpora) -> list[list[str]]:
    if not isinstance(corpora, (list, tuple)):
        corpora = [list(corpora)]
    elif corpora and all(isinstance(c, str) for c in corpora):
        corpora = [list(corpora)]
    return [list(lines) for lines in corpora]


def learn_bpe(corpora, num_merges: int) -> BpeModel:
    """Learn merges jointly over all provided corpora.

    `corpora` is either one sequence of lines or a list of them (source
    and target sides).  Reserved placeholder tokens never contribute to
    the statistics since application passes them through whole.
    """
    if num_merges < 0:
        raise BpeTrainingError("num_merges must be >= 0")
    sides = _normalize_corpora(corpora)
    word_freqs: dict[str, int] = {}
    for lines in sides:
        for line in lines:
            for token in line.split():
                if contains_placeholder(token):
                    continue
                word_freqs[token] = word_freqs.get(token, 0) + 1
    if not word_freqs:
        raise BpeTrainingError("corpus is empty")

    words = [_word_symbols(word) for word in word_freqs]
    freqs = list(word_freqs.values())
    merges: list[tuple[str, str]] = []
    for _ in range(num_merges):
        counts = count_adjacent_pairs(words, freqs)
        if not counts:
            break
        best = min(counts.items(), key=lambda item: (-item[1], item[0]))[0]
        merges.append(best)
        first, second = best
        joined = first + second
        for w, word in enumerate(words):
            if first not in word:
                continue
            merged = []
            i = 0
            while i < len(word):
                if (
                    i < len(word) - 1
                    and word[i] == first
                    and word[i + 1] == second
                ):
                    merged.append(joined)
                    i += 2
                else:
                    merged.append(word[i])
                    i += 1
            words[w] = tuple(merged)
    return BpeModel(tuple(merges))


def _segment_token(model: BpeModel, token: str) -> list[str]:
    cache = model._word_cache
    cached = cache.get(token)
    if cached is not None:
        return cached
    symbols = apply_merges(_word_symbols(token), model._ranks)
    units = []
    last = len(symbols) - 1
    for i, symbol in enumerate(symbols):
        if i == last:
            units.append(symbol[: -len(END_OF_WORD)])
        else:
            units.append(symbol + model.separator)
    cache[token] = units
    return units


def apply_bpe(model: BpeModel, text: str) -> str:
    """Segment one line of whitespace-tokenized text.

    Each token is segmented independently; placeholder tokens pass
    through whole so downstream backends always see them intact.
    """
    out: list[str] = []
    for token in text.split():
        if contains_placeholder(token):
            out.append(token)
        else:
            out.extend(_segment_token(model, token))
    return " ".join(out)


def undo_bpe(text: str, separator: str = BPE_SEPARATOR) -> str:
    """Rejoin subword units: exact inverse of apply_bpe on its output.

    A separator dangling at line end (a truncated translation) is
    stripped rather than rejected.
    """
    joined = text.replace(separator + " ", "")
    if joined.endswith(separator):
        joined = joined[: -len(separator)]
    return joined


def save_bpe(model: BpeModel, path: str | os.PathLike) -> None:
    """One merge per line in rank order, after a version header."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(f"{MODEL_HEADER_PREFIX}{model.separator}\n")
        for first, second in model.merges:
            handle.write(f"{first} {second}\n")


def load_bpe(path: str | os.PathLike) -> BpeModel:
    with open(path, encoding="utf-8") as handle:
        header = handle.readline().rstrip("\n")
        if not header.startswith(MODEL_HEADER_PREFIX):
            raise BpeModelError(f"{os.fspath(path)}: line 1: missing model header")
        separator = header[len(MODEL_HEADER_PREFIX):]
        if not separator:
            raise BpeModelError(f"{os.fspath(path)}: line 1: empty separator")
        merges = []
        for lineno, line in enumerate(handle, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split(" ")
            if len(parts) != 2:
                raise BpeModelError(
                    f"{os.fspath(path)}: line {lineno}: expected two symbols, "
                    f"got {len(parts)}"
                )
            merges.append((parts[0], parts[1]))
    return BpeModel(tuple(merges), separator)
