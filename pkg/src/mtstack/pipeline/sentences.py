"""Rule-based sentence splitting with per-language non-breaking prefixes.

A terminal punctuation run ends a sentence when it is followed by
whitespace and an upper-case letter, digit, or opening punctuation.  A
lone period never splits after a listed abbreviation or a single capital
letter (personal initials).  Sentences are verbatim slices of the input,
so joining them with single spaces reconstructs the text up to the
whitespace between sentences.
"""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

TERMINALS = ".!?…"

# Characters allowed between the terminal run and the sentence-final
# whitespace: closing quotes and brackets stay with the sentence.
_TRAILING_CLOSERS = "\"')]}"

# Characters that can open a sentence in place of an upper-case letter.
_OPENING_PUNCT = "\"'([{¿¡⟦"


@lru_cache(maxsize=None)
def nonbreaking_prefixes(lang: str) -> frozenset[str]:
    """The abbreviation list shipped for `lang`, without trailing dots."""
    raw = (
        resources.files("mtstack.pipeline")
        .joinpath("data", f"abbrev.{lang}.txt")
        .read_text(encoding="utf-8")
    )
    entries = set()
    for line in raw.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            entries.add(line)
    return frozenset(entries)


def _word_before(text: str, index: int) -> str:
    start = index
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    return text[start:index]


def _opens_sentence(char: str) -> bool:
    return char.isupper() or char.isdigit() or char in _OPENING_PUNCT


def _stripped_span(text: str, start: int, end: int) -> tuple[int, int] | None:
    while start < end and text[start].isspace():
        start += 1
    while end > start and text[end - 1].isspace():
        end -= 1
    if start == end:
        return None
    return start, end


def sentence_spans(text: str, lang: str) -> list[tuple[int, int]]:
    """(start, end) spans of each sentence, edge whitespace excluded."""
    prefixes = nonbreaking_prefixes(lang)
    spans: list[tuple[int, int]] = []
    n = len(text)
    start = 0
    i = 0
    while i < n:
        if text[i] not in TERMINALS:
            i += 1
            continue
        run_start = i
        while i + 1 < n and text[i + 1] in TERMINALS:
            i += 1
        end = i + 1
        while end < n and text[end] in _TRAILING_CLOSERS:
            end += 1
        follow = end
        while follow < n and text[follow].isspace():
            follow += 1
        boundary = follow > end and follow < n and _opens_sentence(text[follow])
        if boundary and text[run_start:i + 1] == ".":
            word = _word_before(text, run_start)
            if word in prefixes or (len(word) == 1 and word.isupper()):
                boundary = False
        if boundary:
            span = _stripped_span(text, start, end)
            if span is not None:
                spans.append(span)
            start = follow
            i = follow
        else:
            i += 1
    span = _stripped_span(text, start, n)
    if span is not None:
        spans.append(span)
    return spans


def split_sentences(text: str, lang: str) -> list[str]:
    """Split `text` into sentences; empty input gives an empty list."""
    return [text[start:end] for start, end in sentence_spans(text, lang)]
