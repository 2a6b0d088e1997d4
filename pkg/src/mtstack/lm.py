"""Smoothed n-gram language models for domain scoring.

Models are trained on whitespace-tokenized lines, store log2 probability
and backoff tables in classic backoff form, and score with BOS-padded
contexts and a predicted EOS transition.  Interpolated modified
Kneser-Ney is the default; Witten-Bell is both selectable and the
automatic fallback whenever the count-of-count statistics Kneser-Ney
needs are degenerate.
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

from ._kernels import sequence_log2prob

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"

KNESER_NEY = "interpolated_modified_kneser_ney"
WITTEN_BELL = "witten_bell"
SMOOTHINGS = (KNESER_NEY, WITTEN_BELL)

MIN_ORDER = 1
MAX_ORDER = 5

# Placeholder log2 probability carried by the BOS unigram line, which
# exists only so the line can hold a backoff weight.  BOS is never a
# predicted event.
BOS_PLACEHOLDER = -99.0

logger = logging.getLogger(__name__)


class TrainingError(ValueError):
    """The training corpus cannot produce a model."""


class LmConfigError(ValueError):
    """Order or smoothing selection outside the supported range."""


class LmParseError(ValueError):
    """A model file is malformed."""


@dataclass
class NGramModel:
    order: int
    smoothing: str
    vocabulary: frozenset[str]
    prob_table: dict[tuple[tuple[str, ...], str], float]
    backoff_table: dict[tuple[str, ...], float]

    def predicted_vocabulary(self) -> frozenset[str]:
        """Tokens the model can emit: everything but the BOS sentinel."""
        return self.vocabulary - {BOS}

    def logprob(self, word: str, context: Sequence[str] = ()) -> float:
        """log2 p(word | context) via the standard backoff walk."""
        if word not in self.vocabulary or word == BOS:
            word = UNK
        ctx = tuple(context)[-(self.order - 1):] if self.order > 1 else ()
        acc = 0.0
        while True:
            prob = self.prob_table.get((ctx, word))
            if prob is not None:
                return acc + prob
            if not ctx:
                raise KeyError(f"token missing from unigram table: {word!r}")
            bow = self.backoff_table.get(ctx)
            if bow is not None:
                acc += bow
            ctx = ctx[1:]


@dataclass(frozen=True)
class ScoredSequence:
    tokens: tuple[str, ...]
    log2_prob: float
    cross_entropy_bits_per_token: float


# ---------------------------------------------------------------------------
# Counting

def _collect_counts(tokenized: list[list[str]], order: int):
    """Raw n-gram counts per order, plus distinct-left-context sets.

    raw[m] maps a history tuple (m-1 tokens) to {word: count}; left[m]
    maps the same keys to {word: set of left-context types} for orders
    below the top.  Windows that would predict BOS are skipped.
    """
    raw = [None] + [dict() for _ in range(order)]
    left = [None] + [dict() for _ in range(order)]
    for tokens in tokenized:
        seq = [BOS] + tokens + [EOS]
        length = len(seq)
        for m in range(1, order + 1):
            raw_m = raw[m]
            left_m = left[m] if m < order else None
            for j in range(length - m + 1):
                word = seq[j + m - 1]
                if word == BOS:
                    continue
                hist = tuple(seq[j:j + m - 1])
                slot = raw_m.get(hist)
                if slot is None:
                    slot = raw_m[hist] = {}
                slot[word] = slot.get(word, 0) + 1
                if left_m is not None:
                    lhist = left_m.get(hist)
                    if lhist is None:
                        lhist = left_m[hist] = {}
                    lset = lhist.get(word)
                    if lset is None:
                        lset = lhist[word] = set()
                    if j > 0:
                        lset.add(seq[j - 1])
    return raw, left


def _kn_adjusted_counts(raw, left, order):
    """Counts as used by Kneser-Ney: raw at the top order and for
    BOS-initial histories, distinct-left-extension counts elsewhere."""
    used = [None]
    for m in range(1, order + 1):
        level = {}
        for hist, dist in raw[m].items():
            if m == order or (hist and hist[0] == BOS):
                level[hist] = dict(dist)
            else:
                sets = left[m][hist]
                level[hist] = {w: len(sets[w]) for w in dist}
        used.append(level)
    return used


def _count_of_counts(level: dict) -> tuple[int, int, int, int]:
    n = [0, 0, 0, 0]
    for dist in level.values():
        for count in dist.values():
            if 1 <= count <= 4:
                n[count - 1] += 1
    return tuple(n)


def _kn_discounts(level: dict):
    """(D1, D2, D3plus) for one order, or None when degenerate."""
    n1, n2, n3, n4 = _count_of_counts(level)
    if n1 == 0 or n2 == 0 or n3 == 0:
        return None
    y = n1 / (n1 + 2.0 * n2)
    d1 = 1.0 - 2.0 * y * n2 / n1
    d2 = 2.0 - 3.0 * y * n3 / n2
    d3 = 3.0 - 4.0 * y * n4 / n3
    if d1 <= 0.0 or d2 <= 0.0 or d3 <= 0.0:
        return None
    return d1, d2, d3


# ---------------------------------------------------------------------------
# Training

def train_lm(
    segments: Sequence[str],
    order: int = 4,
    smoothing: str = KNESER_NEY,
) -> NGramModel:
    """Train a smoothed n-gram model on monolingual lines.

    Deterministic: identical input yields identical tables.  When the
    requested smoothing is Kneser-Ney but any order lacks the singleton,
    doubleton, or tripleton n-grams its discount estimates divide by,
    the model silently becomes Witten-Bell (the returned smoothing tag
    reflects what was actually built).
    """
    segments = list(segments)
    if not segments:
        raise TrainingError("training corpus is empty")
    if not isinstance(order, int) or not MIN_ORDER <= order <= MAX_ORDER:
        raise LmConfigError(f"order must be an integer in [{MIN_ORDER}, {MAX_ORDER}]")
    if smoothing not in SMOOTHINGS:
        raise LmConfigError(f"unknown smoothing {smoothing!r}")

    tokenized = [seg.split() for seg in segments]
    predicted = set()
    for tokens in tokenized:
        predicted.update(tokens)
    predicted.discard(BOS)
    predicted.add(EOS)
    predicted.add(UNK)

    raw, left = _collect_counts(tokenized, order)

    if smoothing == KNESER_NEY:
        used = _kn_adjusted_counts(raw, left, order)
        discounts = [None]
        for m in range(1, order + 1):
            d = _kn_discounts(used[m])
            if d is None:
                logger.info(
                    "count-of-count statistics degenerate at order %d; "
                    "falling back to witten_bell", m,
                )
                break
            discounts.append(d)
        else:
            return _finalize(order, KNESER_NEY, predicted,
                             *_build_kn(used, discounts, order, predicted))

    return _finalize(order, WITTEN_BELL, predicted, *_build_wb(raw, order, predicted))


def _build_kn(used, discounts, order, predicted):
    vocab_size = len(predicted)
    linear_probs = {}
    linear_bows = {}

    def state_gamma(dist, d1, d2, d3):
        total = sum(dist.values())
        ones = twos = more = 0
        for count in dist.values():
            if count == 1:
                ones += 1
            elif count == 2:
                twos += 1
            else:
                more += 1
        return (d1 * ones + d2 * twos + d3 * more) / total, total

    d1, d2, d3 = discounts[1]
    dist = used[1].get((), {})
    gamma, total = state_gamma(dist, d1, d2, d3)
    uniform = 1.0 / vocab_size
    for word in predicted:
        count = dist.get(word, 0)
        if count == 0:
            discounted = 0.0
        elif count == 1:
            discounted = count - d1
        elif count == 2:
            discounted = count - d2
        else:
            discounted = count - d3
        linear_probs[((), word)] = discounted / total + gamma * uniform

    for m in range(2, order + 1):
        d1, d2, d3 = discounts[m]
        for hist, dist in used[m].items():
            gamma, total = state_gamma(dist, d1, d2, d3)
            linear_bows[hist] = gamma
            lower = hist[1:]
            for word, count in dist.items():
                if count == 1:
                    discounted = count - d1
                elif count == 2:
                    discounted = count - d2
                else:
                    discounted = count - d3
                linear_probs[(hist, word)] = (
                    discounted / total + gamma * linear_probs[(lower, word)]
                )
    return linear_probs, linear_bows


def _build_wb(raw, order, predicted):
    vocab_size = len(predicted)
    linear_probs = {}
    linear_bows = {}

    dist = raw[1].get((), {})
    total = sum(dist.values())
    distinct = len(dist)
    uniform = 1.0 / vocab_size
    for word in predicted:
        linear_probs[((), word)] = (
            (dist.get(word, 0) + distinct * uniform) / (total + distinct)
        )

    for m in range(2, order + 1):
        for hist, dist in raw[m].items():
            total = sum(dist.values())
            distinct = len(dist)
            linear_bows[hist] = distinct / (total + distinct)
            lower = hist[1:]
            for word, count in dist.items():
                linear_probs[(hist, word)] = (
                    (count + distinct * linear_probs[(lower, word)])
                    / (total + distinct)
                )
    return linear_probs, linear_bows


def _finalize(order, smoothing, predicted, linear_probs, linear_bows):
    prob_table = {key: math.log2(p) for key, p in linear_probs.items()}
    backoff_table = {hist: math.log2(g) for hist, g in linear_bows.items()}
    prob_table[((), BOS)] = BOS_PLACEHOLDER
    vocabulary = frozenset(predicted) | {BOS}
    return NGramModel(order, smoothing, vocabulary, prob_table, backoff_table)


# ---------------------------------------------------------------------------
# Scoring

def _padded(model: NGramModel, text: str) -> tuple[list[str], list[str]]:
    tokens = text.split()
    vocab = model.vocabulary
    seq = [BOS]
    for token in tokens:
        seq.append(token if (token in vocab and token != BOS) else UNK)
    seq.append(EOS)
    return tokens, seq


def score_segment(model: NGramModel, text: str) -> ScoredSequence:
    """Score one line: total log2 probability and bits per token.

    The denominator is token count + 1, counting the EOS transition; an
    empty line is scored as that single transition.
    """
    tokens, seq = _padded(model, text)
    log2_prob = sequence_log2prob(
        seq, model.order - 1, model.prob_table, model.backoff_table
    )
    return ScoredSequence(tuple(tokens), log2_prob, -log2_prob / (len(tokens) + 1))


def cross_entropy(model: NGramModel, segment: str) -> float:
    """Bits per token of one segment under the model."""
    return score_segment(model, segment).cross_entropy_bits_per_token


def perplexity(model: NGramModel, corpus: Iterable[str]) -> float:
    """2 ** (corpus-level cross-entropy: total bits over total events)."""
    total_bits = 0.0
    total_events = 0
    for segment in corpus:
        scored = score_segment(model, segment)
        total_bits -= scored.log2_prob
        total_events += len(scored.tokens) + 1
    if total_events == 0:
        raise TrainingError("cannot compute perplexity of an empty corpus")
    return 2.0 ** (total_bits / total_events)


# ---------------------------------------------------------------------------
# Model files

def save_lm(model: NGramModel, path: str | os.PathLike) -> None:
    """Write the model as ARPA-style plain text.

    Log probabilities and backoff weights are base 2 (declared in the
    header) and printed with repr, so save -> load -> save is a byte-level
    fixpoint.
    """
    by_order: list[list] = [[] for _ in range(model.order + 1)]
    for (hist, word), prob in model.prob_table.items():
        gram = hist + (word,)
        by_order[len(gram)].append((gram, prob))
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("# n-gram model file, log base 2\n")
        handle.write(f"# order: {model.order}\n")
        handle.write(f"# smoothing: {model.smoothing}\n")
        handle.write("\n\\data\\\n")
        for m in range(1, model.order + 1):
            handle.write(f"ngram {m}={len(by_order[m])}\n")
        for m in range(1, model.order + 1):
            handle.write(f"\n\\{m}-grams:\n")
            for gram, prob in sorted(by_order[m]):
                line = f"{prob!r}\t{' '.join(gram)}"
                bow = model.backoff_table.get(gram)
                if bow is not None:
                    line += f"\t{bow!r}"
                handle.write(line + "\n")
        handle.write("\n\\end\\\n")


def load_lm(path: str | os.PathLike) -> NGramModel:
    """Read a model file written by save_lm."""
    order = None
    smoothing = "unknown"
    declared: dict[int, int] = {}
    prob_table: dict[tuple[tuple[str, ...], str], float] = {}
    backoff_table: dict[tuple[str, ...], float] = {}
    vocabulary = set()
    section = None
    seen_data = False
    seen_end = False

    with open(path, encoding="utf-8") as handle:
        for lineno, rawline in enumerate(handle, start=1):
            line = rawline.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                if line.startswith("# order:"):
                    order = int(line.split(":", 1)[1])
                elif line.startswith("# smoothing:"):
                    smoothing = line.split(":", 1)[1].strip()
                continue
            if line == "\\data\\":
                seen_data = True
                section = "data"
                continue
            if line == "\\end\\":
                seen_end = True
                section = None
                continue
            if line.startswith("\\") and line.endswith("-grams:"):
                try:
                    section = int(line[1:-len("-grams:")])
                except ValueError as exc:
                    raise LmParseError(f"{path}: line {lineno}: bad section {line!r}") from exc
                continue
            if section == "data":
                parts = line.split("=")
                if len(parts) != 2 or not parts[0].startswith("ngram "):
                    raise LmParseError(f"{path}: line {lineno}: bad count line {line!r}")
                declared[int(parts[0][len("ngram "):])] = int(parts[1])
                continue
            if isinstance(section, int):
                fields = line.split("\t")
                if len(fields) not in (2, 3):
                    raise LmParseError(
                        f"{path}: line {lineno}: expected 2 or 3 tab-separated fields"
                    )
                try:
                    prob = float(fields[0])
                except ValueError as exc:
                    raise LmParseError(f"{path}: line {lineno}: bad probability") from exc
                gram = tuple(fields[1].split(" "))
                if len(gram) != section:
                    raise LmParseError(
                        f"{path}: line {lineno}: {len(gram)}-gram in \\{section}-grams: section"
                    )
                prob_table[(gram[:-1], gram[-1])] = prob
                if len(fields) == 3:
                    try:
                        backoff_table[gram] = float(fields[2])
                    except ValueError as exc:
                        raise LmParseError(f"{path}: line {lineno}: bad backoff") from exc
                if section == 1:
                    vocabulary.add(gram[0])
                continue
            raise LmParseError(f"{path}: line {lineno}: unexpected content {line!r}")

    if not seen_data or not seen_end:
        raise LmParseError(f"{path}: missing \\data\\ or \\end\\ marker")
    counted: dict[int, int] = {}
    for (hist, _word) in prob_table:
        counted[len(hist) + 1] = counted.get(len(hist) + 1, 0) + 1
    for m, expected in declared.items():
        if counted.get(m, 0) != expected:
            raise LmParseError(
                f"{path}: \\{m}-grams: section has {counted.get(m, 0)} entries, "
                f"header declares {expected}"
            )
    if order is None:
        order = max(declared) if declared else 1
    return NGramModel(order, smoothing, frozenset(vocabulary), prob_table, backoff_table)
