"""Character normalization driven by a shipped mapping table.

All five languages share one table: curly and angled quotes fold to the
straight ASCII forms, dash variants to hyphen-minus, and non-breaking or
exotic spaces to the plain space.  Text is NFC-composed first so every
downstream component sees one canonical byte sequence per character.
"""

from __future__ import annotations

import unicodedata
from functools import lru_cache
from importlib import resources

TABLE_FILE = "charnorm.tsv"


class NormalizationTableError(ValueError):
    """The shipped mapping table is malformed."""


def _parse_codepoint(column: str, lineno: int) -> str:
    if not column.startswith("U+"):
        raise NormalizationTableError(
            f"{TABLE_FILE}: line {lineno}: expected U+XXXX, got {column!r}"
        )
    try:
        return chr(int(column[2:], 16))
    except ValueError:
        raise NormalizationTableError(
            f"{TABLE_FILE}: line {lineno}: bad codepoint {column!r}"
        ) from None


@lru_cache(maxsize=1)
def char_mapping() -> dict[int, str]:
    """The table as a str.translate mapping, loaded once per process."""
    raw = (
        resources.files("mtstack.pipeline")
        .joinpath("data", TABLE_FILE)
        .read_text(encoding="utf-8")
    )
    mapping: dict[int, str] = {}
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line or line.startswith("#"):
            continue
        columns = line.split("\t")
        if len(columns) != 2:
            raise NormalizationTableError(
                f"{TABLE_FILE}: line {lineno}: expected two columns"
            )
        source = _parse_codepoint(columns[0], lineno)
        target = _parse_codepoint(columns[1], lineno)
        mapping[ord(source)] = target
    return mapping


def normalize_chars(text: str, lang: str = "en") -> str:
    """NFC-compose `text`, then apply the character mapping table.

    The `lang` argument is accepted for interface symmetry with the other
    pipeline stages; the mapping itself is language independent.
    """
    return unicodedata.normalize("NFC", text).translate(char_mapping())
