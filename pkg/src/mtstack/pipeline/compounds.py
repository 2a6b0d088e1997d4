"""Frequency-based compound splitting and exact rejoining.

A compound splits into lexicon parts, optionally connected by the
linking morphemes "s" or "es", choosing the decomposition with the
highest geometric mean of part frequencies.  The whole word competes as
its own one-part decomposition, so frequent full forms are left alone.
Emitted parts are verbatim slices of the token (linkers glued to the
part before them) with a joint marker on every non-final part, which
makes rejoining a plain concatenation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from ..markers import COMPOUND_JOINT

DEFAULT_MIN_PART_LENGTH = 4
LINKERS = ("s", "es")


class LexiconError(ValueError):
    """A frequency table violates the lexicon invariants."""


@dataclass
class CompoundLexicon:
    frequencies: dict[str, int]
    min_part_length: int = DEFAULT_MIN_PART_LENGTH

    def __post_init__(self) -> None:
        if self.min_part_length < 1:
            raise LexiconError("min_part_length must be >= 1")
        folded: dict[str, int] = {}
        for word, freq in self.frequencies.items():
            if freq < 1:
                raise LexiconError(f"frequency for {word!r} must be positive")
            key = word.lower()
            folded[key] = folded.get(key, 0) + freq
        self.frequencies = folded

    @classmethod
    def from_tokens(
        cls,
        tokens: Iterable[str],
        min_part_length: int = DEFAULT_MIN_PART_LENGTH,
    ) -> "CompoundLexicon":
        counts: dict[str, int] = {}
        for token in tokens:
            if token.isalpha():
                key = token.lower()
                counts[key] = counts.get(key, 0) + 1
        return cls(counts, min_part_length)


def _decompositions(lower: str, lexicon: CompoundLexicon):
    """Yield (boundaries, frequencies) over all valid decompositions.

    Boundaries are (part_end, linker_length) pairs; parts and linkers
    tile the token exactly.
    """
    frequencies = lexicon.frequencies
    min_len = lexicon.min_part_length
    n = len(lower)
    stack = [(0, (), ())]
    while stack:
        start, bounds, freqs = stack.pop()
        if start == n:
            if bounds:
                yield bounds, freqs
            continue
        for end in range(start + min_len, n + 1):
            part = lower[start:end]
            freq = frequencies.get(part)
            if freq is None:
                continue
            stack.append((end, bounds + ((end, 0),), freqs + (freq,)))
            if end < n:
                for linker in LINKERS:
                    if lower.startswith(linker, end):
                        stack.append((
                            end + len(linker),
                            bounds + ((end, len(linker)),),
                            freqs + (freq,),
                        ))


def _best_decomposition(token: str, lexicon: CompoundLexicon):
    """The winning decomposition, or None when the token has none.

    Ranking: highest geometric mean of part frequencies, then fewest
    parts, then lexicographically smallest boundary tuple.  Log
    frequencies are sorted before summing so equal multisets compare
    exactly equal.
    """
    best_key = None
    best = None
    for bounds, freqs in _decompositions(token.lower(), lexicon):
        mean_log = sum(sorted(math.log(f) for f in freqs)) / len(freqs)
        key = (-mean_log, len(bounds), bounds)
        if best_key is None or key < best_key:
            best_key = key
            best = (bounds, mean_log)
    return best


def split_score(token: str, lexicon: CompoundLexicon) -> float:
    """Geometric mean achieved by the best decomposition, 0.0 if none."""
    best = _best_decomposition(token, lexicon)
    if best is None:
        return 0.0
    return math.exp(best[1])


def split_compounds(token: str, lexicon: CompoundLexicon) -> list[str]:
    """Split one token into marked parts, or return it unchanged.

    Lexicon lookups fold case, but the emitted parts are slices of the
    original token, so concatenating them restores it exactly.
    """
    best = _best_decomposition(token, lexicon)
    if best is None or len(best[0]) < 2:
        return [token]
    bounds = best[0]
    parts = []
    start = 0
    for i, (end, linker_len) in enumerate(bounds):
        stop = end + linker_len
        piece = token[start:stop]
        if i < len(bounds) - 1:
            piece += COMPOUND_JOINT
        parts.append(piece)
        start = stop
    return parts


def rejoin_compounds(tokens: Sequence[str]) -> list[str]:
    """Concatenate marked parts back into whole tokens.

    The exact inverse of split_compounds over a token stream; a marker
    dangling on the stream's last token is dropped rather than kept.
    """
    out: list[str] = []
    pending = ""
    for token in tokens:
        if token.endswith(COMPOUND_JOINT):
            pending += token[: -len(COMPOUND_JOINT)]
        else:
            out.append(pending + token)
            pending = ""
    if pending:
        out.append(pending)
    return out
