"""Corpus-level BLEU and chrF plus paired-bootstrap significance.

Both scorers consume pre-tokenized text and never retokenize: BLEU reads
whitespace tokens, chrF drops whitespace and works on the remaining
character stream.  Scores live on a 0-100 scale.
"""

from __future__ import annotations

import hashlib
import math
import random
import re
from dataclasses import dataclass
from typing import Sequence

from ._kernels import count_char_ngrams, count_token_ngrams

BLEU_ORDER = 4

P_VALUE_CONVENTION = (
    "two-sided sign test over bootstrap resamples: fraction of resampled "
    "score differences that are zero or oppose the observed direction; "
    "p = 1.0 when the observed difference is exactly zero"
)

_WHITESPACE = re.compile(r"\s+")


class PairingError(ValueError):
    """Hypothesis and reference sequences do not line up."""


@dataclass(frozen=True)
class BleuScore:
    score: float
    precisions: tuple[float, float, float, float]
    brevity_penalty: float
    hyp_length: int
    ref_length: int

    def as_dict(self) -> dict:
        return {
            "score": self.score,
            "precisions": list(self.precisions),
            "brevity_penalty": self.brevity_penalty,
            "hyp_length": self.hyp_length,
            "ref_length": self.ref_length,
        }


@dataclass(frozen=True)
class ChrfScore:
    score: float
    beta: float
    char_order: int
    per_order_precision: tuple[float, ...]
    per_order_recall: tuple[float, ...]

    def as_dict(self) -> dict:
        return {
            "score": self.score,
            "beta": self.beta,
            "char_order": self.char_order,
            "per_order_precision": list(self.per_order_precision),
            "per_order_recall": list(self.per_order_recall),
        }


@dataclass(frozen=True)
class SignificanceResult:
    delta: float
    p_value: float
    iterations: int
    seed: int
    metric: str
    score_a: float
    score_b: float
    convention: str = P_VALUE_CONVENTION

    def as_dict(self) -> dict:
        return {
            "delta": self.delta,
            "p_value": self.p_value,
            "iterations": self.iterations,
            "seed": self.seed,
            "metric": self.metric,
            "score_a": self.score_a,
            "score_b": self.score_b,
            "convention": self.convention,
        }


def _check_paired(hypotheses: Sequence[str], references: Sequence[str]) -> None:
    if len(hypotheses) != len(references):
        raise PairingError(
            f"{len(hypotheses)} hypotheses vs {len(references)} references"
        )
    if len(hypotheses) == 0:
        raise PairingError("need at least one segment to score")


# ---------------------------------------------------------------------------
# BLEU

def _bleu_segment_stats(hyp: str, ref: str) -> tuple:
    """(match_1..4, total_1..4, hyp_len, ref_len) for one segment."""
    hyp_tokens = hyp.split()
    ref_tokens = ref.split()
    hyp_counts = count_token_ngrams(hyp_tokens, BLEU_ORDER)
    ref_counts = count_token_ngrams(ref_tokens, BLEU_ORDER)
    matches = [0] * BLEU_ORDER
    totals = [0] * BLEU_ORDER
    for gram, count in hyp_counts.items():
        n = len(gram) - 1
        totals[n] += count
        ref_count = ref_counts.get(gram)
        if ref_count:
            matches[n] += min(count, ref_count)
    return (*matches, *totals, len(hyp_tokens), len(ref_tokens))


def _bleu_from_stats(stats: Sequence[int]) -> BleuScore:
    matches = stats[:BLEU_ORDER]
    totals = stats[BLEU_ORDER:2 * BLEU_ORDER]
    hyp_len = stats[2 * BLEU_ORDER]
    ref_len = stats[2 * BLEU_ORDER + 1]
    precisions = tuple(
        matches[n] / totals[n] if totals[n] else 0.0 for n in range(BLEU_ORDER)
    )
    if hyp_len == 0:
        # empty output: no brevity credit, no score
        bp = 0.0
    elif hyp_len > ref_len:
        bp = 1.0
    else:
        bp = math.exp(1.0 - ref_len / hyp_len)
    if bp == 0.0 or any(p == 0.0 for p in precisions):
        score = 0.0
    else:
        log_mean = sum(math.log(p) for p in precisions) / BLEU_ORDER
        score = 100.0 * bp * math.exp(log_mean)
    return BleuScore(score, precisions, bp, hyp_len, ref_len)


def bleu_corpus(hypotheses: Sequence[str], references: Sequence[str]) -> BleuScore:
    """Corpus BLEU over clipped 1-4 gram counts summed before division.

    No smoothing: if any order has zero clipped matches the score is 0,
    with the individual precisions still reported.
    """
    _check_paired(hypotheses, references)
    totals = None
    for hyp, ref in zip(hypotheses, references):
        stats = _bleu_segment_stats(hyp, ref)
        if totals is None:
            totals = list(stats)
        else:
            for i, value in enumerate(stats):
                totals[i] += value
    return _bleu_from_stats(totals)


# ---------------------------------------------------------------------------
# chrF

def _chrf_segment_stats(hyp: str, ref: str, char_order: int) -> list[int]:
    """Per-order [hyp_total, ref_total, common] triples, flattened."""
    hyp_chars = _WHITESPACE.sub("", hyp)
    ref_chars = _WHITESPACE.sub("", ref)
    stats = []
    for order in range(1, char_order + 1):
        hyp_counts = count_char_ngrams(hyp_chars, order)
        ref_counts = count_char_ngrams(ref_chars, order)
        common = 0
        for gram, count in hyp_counts.items():
            ref_count = ref_counts.get(gram)
            if ref_count:
                common += min(count, ref_count)
        stats.extend(
            (sum(hyp_counts.values()), sum(ref_counts.values()), common)
        )
    return stats


def _chrf_from_stats(stats: Sequence[int], char_order: int, beta: float) -> ChrfScore:
    precisions = []
    recalls = []
    active_p = []
    active_r = []
    for order in range(char_order):
        hyp_total, ref_total, common = stats[3 * order:3 * order + 3]
        p = common / hyp_total if hyp_total else 0.0
        r = common / ref_total if ref_total else 0.0
        precisions.append(p)
        recalls.append(r)
        if hyp_total or ref_total:
            active_p.append(p)
            active_r.append(r)
    if not active_p:
        score = 0.0
    else:
        avg_p = sum(active_p) / len(active_p)
        avg_r = sum(active_r) / len(active_r)
        if avg_p + avg_r == 0.0:
            score = 0.0
        else:
            b2 = beta * beta
            score = 100.0 * (1 + b2) * avg_p * avg_r / (b2 * avg_p + avg_r)
    return ChrfScore(score, beta, char_order, tuple(precisions), tuple(recalls))


def chrf_corpus(
    hypotheses: Sequence[str],
    references: Sequence[str],
    char_order: int = 6,
    beta: float = 2.0,
) -> ChrfScore:
    """Corpus chrF on whitespace-removed character n-grams.

    Per-order precision and recall are aggregated over the corpus and
    macro-averaged; orders where neither side produced a single n-gram
    are skipped so that identical corpora score exactly 100 regardless
    of segment length.
    """
    _check_paired(hypotheses, references)
    totals = [0] * (3 * char_order)
    for hyp, ref in zip(hypotheses, references):
        for i, value in enumerate(_chrf_segment_stats(hyp, ref, char_order)):
            totals[i] += value
    return _chrf_from_stats(totals, char_order, beta)


# ---------------------------------------------------------------------------
# Paired bootstrap resampling

def _merge_stats(per_segment: list, indices: Sequence[int]) -> list:
    merged = [0] * len(per_segment[0])
    for index in indices:
        stats = per_segment[index]
        for i, value in enumerate(stats):
            merged[i] += value
    return merged


def paired_bootstrap(
    hyps_a: Sequence[str],
    hyps_b: Sequence[str],
    references: Sequence[str],
    metric: str = "bleu",
    iterations: int = 1000,
    *,
    seed: int,
) -> SignificanceResult:
    """Koehn-style paired bootstrap over test-set segments.

    Per-segment sufficient statistics are computed once; every iteration
    resamples segment indices with replacement from its own derived
    sub-seed, so runs are deterministic for a given seed and independent
    across iterations.
    """
    if len(hyps_a) != len(hyps_b):
        raise PairingError(f"{len(hyps_a)} vs {len(hyps_b)} hypothesis segments")
    _check_paired(hyps_a, references)
    if iterations < 1:
        raise ValueError("iterations must be >= 1")

    if metric == "bleu":
        segment_stats = _bleu_segment_stats
        def score_of(stats):
            return _bleu_from_stats(stats).score
        stats_a = [segment_stats(h, r) for h, r in zip(hyps_a, references)]
        stats_b = [segment_stats(h, r) for h, r in zip(hyps_b, references)]
    elif metric == "chrf":
        stats_a = [_chrf_segment_stats(h, r, 6) for h, r in zip(hyps_a, references)]
        stats_b = [_chrf_segment_stats(h, r, 6) for h, r in zip(hyps_b, references)]
        def score_of(stats):
            return _chrf_from_stats(stats, 6, 2.0).score
    else:
        raise ValueError(f"unknown metric {metric!r} (expected 'bleu' or 'chrf')")

    n = len(references)
    score_a = score_of(_merge_stats(stats_a, range(n)))
    score_b = score_of(_merge_stats(stats_b, range(n)))
    delta = score_a - score_b

    if delta == 0.0:
        return SignificanceResult(delta, 1.0, iterations, seed, metric, score_a, score_b)

    master = random.Random(seed)
    sub_seeds = [master.getrandbits(64) for _ in range(iterations)]
    sign = 1.0 if delta > 0 else -1.0
    contradictions = 0
    for sub_seed in sub_seeds:
        rng = random.Random(sub_seed)
        indices = [rng.randrange(n) for _ in range(n)]
        resampled = score_of(_merge_stats(stats_a, indices)) - score_of(
            _merge_stats(stats_b, indices)
        )
        if resampled * sign <= 0.0:
            contradictions += 1
    p_value = contradictions / iterations
    return SignificanceResult(delta, p_value, iterations, seed, metric, score_a, score_b)


def lines_fingerprint(*line_sets: Sequence[str]) -> str:
    """Stable hash of the exact evaluated text, for score reports."""
    digest = hashlib.sha256()
    for lines in line_sets:
        for line in lines:
            digest.update(line.encode("utf-8"))
            digest.update(b"\n")
        digest.update(b"\x1e")
    return digest.hexdigest()
