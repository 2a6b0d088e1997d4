"""Parallel corpus loading, cleaning, statistics, and serialization.

Corpora are ordered sequences of aligned segment pairs between English and
one of {fr, de, it, es}.  Cleaning is a pure function that filters pairs
by a fixed rule cascade and reports exactly where every removed pair went.
"""

from __future__ import annotations

import json
import os
import unicodedata
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple

LANGUAGES = ("en", "fr", "de", "it", "es")

# Attribution order for cleaning rules.  A removed pair is counted under
# the first rule in this tuple that it violates.
CLEANING_RULES = ("empty", "too_short", "too_long", "ratio", "duplicate")


class CorpusError(ValueError):
    """Base class for corpus file problems."""


class AlignmentError(CorpusError):
    """Dual files disagree on line count."""


class CorpusEncodingError(CorpusError):
    """A line could not be decoded as UTF-8."""


class CorpusFormatError(CorpusError):
    """A structured file (TSV) has a malformed line."""


@dataclass(frozen=True)
class Segment:
    """One line of text plus its cached whitespace token count."""

    text: str
    token_count: int

    @classmethod
    def from_text(cls, text: str) -> "Segment":
        text = unicodedata.normalize("NFC", text)
        if "\n" in text or "\r" in text:
            raise ValueError("segment text must not contain newline characters")
        return cls(text, len(text.split()))


@dataclass(frozen=True)
class SegmentPair:
    source: Segment
    target: Segment
    provenance: str = "unspecified"

    def __post_init__(self) -> None:
        if not self.provenance:
            raise ValueError("provenance must be non-empty")


@dataclass(frozen=True)
class ParallelCorpus:
    pairs: tuple[SegmentPair, ...]
    source_lang: str
    target_lang: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "pairs", tuple(self.pairs))
        for code in (self.source_lang, self.target_lang):
            if code not in LANGUAGES:
                raise ValueError(f"unsupported language code: {code!r}")
        if self.source_lang == self.target_lang:
            raise ValueError("source and target language must differ")
        if "en" not in (self.source_lang, self.target_lang):
            raise ValueError("one side of a corpus must be English")

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[SegmentPair]:
        return iter(self.pairs)

    def __getitem__(self, index: int) -> SegmentPair:
        return self.pairs[index]


@dataclass(frozen=True)
class CleaningConfig:
    min_tokens: int = 1
    max_tokens: int = 100
    max_length_ratio: float = 9.0
    drop_duplicates: bool = True

    def __post_init__(self) -> None:
        if self.min_tokens < 1:
            raise ValueError("min_tokens must be at least 1")
        if self.max_tokens < self.min_tokens:
            raise ValueError("max_tokens must be >= min_tokens")
        if self.max_length_ratio < 1.0:
            raise ValueError("max_length_ratio must be >= 1")


@dataclass
class CleaningReport:
    input_pairs: int
    retained_pairs: int
    removed_by_rule: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for rule in CLEANING_RULES:
            self.removed_by_rule.setdefault(rule, 0)

    def to_json(self) -> str:
        return json.dumps(
            {
                "input_pairs": self.input_pairs,
                "retained_pairs": self.retained_pairs,
                "removed_by_rule": {r: self.removed_by_rule[r] for r in CLEANING_RULES},
            },
            indent=2,
        )

    def to_table(self) -> str:
        rows = [("input", self.input_pairs), ("retained", self.retained_pairs)]
        rows += [(f"removed: {r}", self.removed_by_rule[r]) for r in CLEANING_RULES]
        width = max(len(name) for name, _ in rows)
        return "\n".join(f"{name:<{width}}  {count:>10}" for name, count in rows)


class CorpusStats(NamedTuple):
    segments: int
    source_words: int
    target_words: int


def _decode_lines(path: str | os.PathLike) -> list[str]:
    """Read a text file as UTF-8 lines, reporting the line of any bad byte."""
    with open(path, "rb") as handle:
        raw = handle.read()
    lines = []
    for i, chunk in enumerate(raw.splitlines(), start=1):
        try:
            lines.append(chunk.decode("utf-8"))
        except UnicodeDecodeError as exc:
            raise CorpusEncodingError(f"{os.fspath(path)}: line {i}: {exc}") from exc
    return lines


def _provenance_for(path: str | os.PathLike) -> str:
    stem = os.path.splitext(os.path.basename(os.fspath(path)))[0]
    return stem or "unspecified"


def load_parallel(
    source_path: str | os.PathLike | None = None,
    target_path: str | os.PathLike | None = None,
    *,
    tsv_path: str | os.PathLike | None = None,
    source_lang: str,
    target_lang: str,
    provenance: str | None = None,
) -> ParallelCorpus:
    """Load a parallel corpus from dual line-aligned files or a 2-column TSV.

    Dual files must have equal line counts; TSV lines must contain exactly
    one tab.  Newline conventions are normalized, pair order follows file
    order.
    """
    if tsv_path is not None:
        if source_path is not None or target_path is not None:
            raise ValueError("pass either dual files or a TSV, not both")
        label = provenance or _provenance_for(tsv_path)
        pairs = []
        for i, line in enumerate(_decode_lines(tsv_path), start=1):
            columns = line.split("\t")
            if len(columns) != 2:
                raise CorpusFormatError(
                    f"{os.fspath(tsv_path)}: line {i}: expected 2 tab-separated "
                    f"columns, found {len(columns)}"
                )
            pairs.append(
                SegmentPair(Segment.from_text(columns[0]), Segment.from_text(columns[1]), label)
            )
        return ParallelCorpus(tuple(pairs), source_lang, target_lang)

    if source_path is None or target_path is None:
        raise ValueError("dual-file form needs both source_path and target_path")
    source_lines = _decode_lines(source_path)
    target_lines = _decode_lines(target_path)
    if len(source_lines) != len(target_lines):
        raise AlignmentError(
            f"line count mismatch: {os.fspath(source_path)} has {len(source_lines)} "
            f"lines, {os.fspath(target_path)} has {len(target_lines)}"
        )
    label = provenance or _provenance_for(source_path)
    pairs = [
        SegmentPair(Segment.from_text(src), Segment.from_text(tgt), label)
        for src, tgt in zip(source_lines, target_lines)
    ]
    return ParallelCorpus(tuple(pairs), source_lang, target_lang)


def clean(corpus: ParallelCorpus, config: CleaningConfig | None = None) -> tuple[ParallelCorpus, CleaningReport]:
    """Filter a corpus through the fixed rule cascade.

    Rules run per pair in the order empty, too_short, too_long, ratio,
    duplicate; each removed pair is attributed to the first rule that
    catches it.  Survivor order is preserved and the first occurrence of
    a duplicated pair is the one kept.
    """
    config = config or CleaningConfig()
    removed = {rule: 0 for rule in CLEANING_RULES}
    kept: list[SegmentPair] = []
    seen: set[tuple[str, str]] = set()
    for pair in corpus:
        src_n = pair.source.token_count
        tgt_n = pair.target.token_count
        if src_n == 0 or tgt_n == 0:
            removed["empty"] += 1
            continue
        if min(src_n, tgt_n) < config.min_tokens:
            removed["too_short"] += 1
            continue
        if max(src_n, tgt_n) > config.max_tokens:
            removed["too_long"] += 1
            continue
        if max(src_n, tgt_n) / min(src_n, tgt_n) > config.max_length_ratio:
            removed["ratio"] += 1
            continue
        if config.drop_duplicates:
            key = (pair.source.text, pair.target.text)
            if key in seen:
                removed["duplicate"] += 1
                continue
            seen.add(key)
        kept.append(pair)
    report = CleaningReport(len(corpus), len(kept), removed)
    return ParallelCorpus(tuple(kept), corpus.source_lang, corpus.target_lang), report


def corpus_stats(corpus: ParallelCorpus) -> CorpusStats:
    """Segment count plus whitespace word totals for each side."""
    source_words = sum(p.source.token_count for p in corpus)
    target_words = sum(p.target.token_count for p in corpus)
    return CorpusStats(len(corpus), source_words, target_words)


def stats_table(corpus: ParallelCorpus) -> str:
    """Render statistics as a one-row table: Sent | Words(src) | Words(tgt)."""
    stats = corpus_stats(corpus)
    header = f"{'Sent':>10} | {'Words(' + corpus.source_lang + ')':>12} | {'Words(' + corpus.target_lang + ')':>12}"
    row = f"{stats.segments:>10} | {stats.source_words:>12} | {stats.target_words:>12}"
    return header + "\n" + row


def save_parallel(
    corpus: ParallelCorpus,
    source_path: str | os.PathLike | None = None,
    target_path: str | os.PathLike | None = None,
    *,
    tsv_path: str | os.PathLike | None = None,
) -> None:
    """Write a corpus back to dual files or a 2-column TSV.

    Inverse of load_parallel on segment text.  TSV output refuses segments
    containing tabs, since they could not be read back as 2 columns.
    """
    if tsv_path is not None:
        if source_path is not None or target_path is not None:
            raise ValueError("pass either dual files or a TSV, not both")
        with open(tsv_path, "w", encoding="utf-8", newline="\n") as handle:
            for i, pair in enumerate(corpus, start=1):
                if "\t" in pair.source.text or "\t" in pair.target.text:
                    raise CorpusFormatError(
                        f"pair {i}: segment text contains a tab; TSV output would not round-trip"
                    )
                handle.write(f"{pair.source.text}\t{pair.target.text}\n")
        return
    if source_path is None or target_path is None:
        raise ValueError("dual-file form needs both source_path and target_path")
    with open(source_path, "w", encoding="utf-8", newline="\n") as src_handle:
        for pair in corpus:
            src_handle.write(pair.source.text + "\n")
    with open(target_path, "w", encoding="utf-8", newline="\n") as tgt_handle:
        for pair in corpus:
            tgt_handle.write(pair.target.text + "\n")


def corpus_from_pairs(
    texts: Iterable[tuple[str, str]],
    source_lang: str,
    target_lang: str,
    provenance: str = "unspecified",
) -> ParallelCorpus:
    """Build a corpus from (source_text, target_text) tuples."""
    pairs = tuple(
        SegmentPair(Segment.from_text(src), Segment.from_text(tgt), provenance)
        for src, tgt in texts
    )
    return ParallelCorpus(pairs, source_lang, target_lang)
