"""Reversible masking of URLs, markup tags, and do-not-translate terms.

Masking swaps each protected span for a reserved ⟦KIND-k⟧ token and
records the original, so unmasking after translation restores every
entity byte for byte no matter where the backend moved the tokens.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator

from ..markers import PLACEHOLDER_RE, placeholder

URL_RE = re.compile(r"(?:https?|ftp)://\S+|www\.\S+")
TAG_RE = re.compile(r"</?[A-Za-z][^<>]*>")

# Sentence punctuation glued to the end of a URL match belongs to the
# sentence, not the address.
_URL_TRAILING = ".,;:!?)]}\"'"


class ReinstatementError(ValueError):
    """Translated text carries a placeholder the map does not know."""


@dataclass(frozen=True)
class PlaceholderMap:
    """Ordered record of every masked span in one document."""

    entries: tuple[tuple[str, str, str], ...] = ()
    document_id: str = ""

    def originals(self) -> dict[str, str]:
        return {token: original for token, original, _ in self.entries}

    def __len__(self) -> int:
        return len(self.entries)


def _url_spans(text: str) -> Iterator[tuple[int, int, str]]:
    for match in URL_RE.finditer(text):
        start, end = match.span()
        while end > start and text[end - 1] in _URL_TRAILING:
            end -= 1
        if end > start:
            yield start, end, "URL"


def _tag_spans(text: str) -> Iterator[tuple[int, int, str]]:
    for match in TAG_RE.finditer(text):
        yield match.start(), match.end(), "TAG"


def _dnt_spans(text: str, glossary: Iterable[str]) -> Iterator[tuple[int, int, str]]:
    for term in dict.fromkeys(glossary):
        if not term:
            continue
        position = text.find(term)
        while position != -1:
            end = position + len(term)
            standalone = (position == 0 or not text[position - 1].isalnum()) and (
                end == len(text) or not text[end].isalnum()
            )
            if standalone:
                yield position, end, "DNT"
            position = text.find(term, position + 1)


def mask_entities(
    text: str,
    dnt_glossary: Iterable[str] = (),
    document_id: str = "",
) -> tuple[str, PlaceholderMap]:
    """Replace URLs, tags, and glossary terms with fresh placeholders.

    Overlapping candidates are resolved longest match first, then
    leftmost.  Placeholders are numbered 1-based per kind in reading
    order.
    """
    candidates = [
        *_url_spans(text),
        *_tag_spans(text),
        *_dnt_spans(text, dnt_glossary),
    ]
    candidates.sort(key=lambda span: (span[0] - span[1], span[0]))
    accepted: list[tuple[int, int, str]] = []
    for start, end, kind in candidates:
        if all(end <= s or start >= e for s, e, _ in accepted):
            accepted.append((start, end, kind))
    accepted.sort()

    counters = dict.fromkeys(("URL", "TAG", "DNT"), 0)
    entries = []
    pieces = []
    cursor = 0
    for start, end, kind in accepted:
        counters[kind] += 1
        token = placeholder(kind, counters[kind])
        entries.append((token, text[start:end], kind))
        pieces.append(text[cursor:start])
        pieces.append(token)
        cursor = end
    pieces.append(text[cursor:])
    return "".join(pieces), PlaceholderMap(tuple(entries), document_id)


def unmask_entities(text: str, placeholder_map: PlaceholderMap) -> str:
    """Restore the original text behind every placeholder in `text`.

    A placeholder with no map entry is an unrecoverable translation
    artifact and raises rather than passing silently into output.
    """
    originals = placeholder_map.originals()

    def restore(match: re.Match) -> str:
        token = match.group(0)
        if token not in originals:
            raise ReinstatementError(f"placeholder {token} missing from map")
        return originals[token]

    return PLACEHOLDER_RE.sub(restore, text)
