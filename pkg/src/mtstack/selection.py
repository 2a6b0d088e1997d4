"""Pseudo in-domain sentence-pair selection and fine-tuning set assembly.

Pairs are ranked by bilingual cross-entropy difference: the sum over both
sides of H(in-domain LM) - H(out-of-domain LM), lower meaning more
in-domain.  Text is tokenized and lowercased by one shared code path
before both LM training and scoring, because any asymmetry there corrupts
every score silently.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .corpus import ParallelCorpus, Segment, SegmentPair
from .lm import KNESER_NEY, NGramModel, cross_entropy, train_lm
from .pipeline.tokenizer import tokenize


class SelectionConfigError(ValueError):
    """Corpus and model languages do not line up."""


def prep_line(text: str, lang: str) -> str:
    """The single tokenize-and-lowercase path used for LM training and scoring."""
    return " ".join(tokenize(text, lang)).lower()


def prep_lines(lines: Iterable[str], lang: str) -> list[str]:
    return [prep_line(line, lang) for line in lines]


def train_domain_lm(
    lines: Iterable[str],
    lang: str,
    order: int = 4,
    smoothing: str = KNESER_NEY,
) -> NGramModel:
    """Train an LM on lines prepared by the shared preprocessing path."""
    return train_lm(prep_lines(lines, lang), order=order, smoothing=smoothing)


@dataclass(frozen=True)
class LmQuad:
    in_src: NGramModel
    out_src: NGramModel
    in_tgt: NGramModel
    out_tgt: NGramModel
    src_lang: str | None = None
    tgt_lang: str | None = None


@dataclass(frozen=True)
class SelectionScore:
    pair_index: int
    h_in_src: float
    h_out_src: float
    h_in_tgt: float
    h_out_tgt: float
    score: float

    TSV_HEADER = "index\th_in_src\th_out_src\th_in_tgt\th_out_tgt\tscore"

    def to_tsv(self) -> str:
        return (
            f"{self.pair_index}\t{self.h_in_src!r}\t{self.h_out_src!r}"
            f"\t{self.h_in_tgt!r}\t{self.h_out_tgt!r}\t{self.score!r}"
        )


def quad_from_corpora(
    in_corpus: ParallelCorpus,
    out_corpus: ParallelCorpus,
    order: int = 4,
    smoothing: str = KNESER_NEY,
) -> LmQuad:
    """Train the four domain models from an in-domain and an out-of-domain corpus."""
    if (in_corpus.source_lang, in_corpus.target_lang) != (
        out_corpus.source_lang,
        out_corpus.target_lang,
    ):
        raise SelectionConfigError(
            "in-domain and out-of-domain corpora must share a language pair"
        )
    src_lang = in_corpus.source_lang
    tgt_lang = in_corpus.target_lang
    return LmQuad(
        in_src=train_domain_lm((p.source.text for p in in_corpus), src_lang, order, smoothing),
        out_src=train_domain_lm((p.source.text for p in out_corpus), src_lang, order, smoothing),
        in_tgt=train_domain_lm((p.target.text for p in in_corpus), tgt_lang, order, smoothing),
        out_tgt=train_domain_lm((p.target.text for p in out_corpus), tgt_lang, order, smoothing),
        src_lang=src_lang,
        tgt_lang=tgt_lang,
    )


def score_monolingual(
    segment: str,
    in_model: NGramModel,
    out_model: NGramModel,
    lang: str = "en",
) -> float:
    """H_in(segment) - H_out(segment); negative looks in-domain."""
    prepped = prep_line(segment, lang)
    return cross_entropy(in_model, prepped) - cross_entropy(out_model, prepped)


def score_bilingual(pair: SegmentPair, quad: LmQuad, pair_index: int = 0) -> SelectionScore:
    """Bilingual cross-entropy difference for one pair."""
    src_lang = quad.src_lang or "en"
    tgt_lang = quad.tgt_lang or "en"
    src = prep_line(pair.source.text, src_lang)
    tgt = prep_line(pair.target.text, tgt_lang)
    h_in_src = cross_entropy(quad.in_src, src)
    h_out_src = cross_entropy(quad.out_src, src)
    h_in_tgt = cross_entropy(quad.in_tgt, tgt)
    h_out_tgt = cross_entropy(quad.out_tgt, tgt)
    score = (h_in_src - h_out_src) + (h_in_tgt - h_out_tgt)
    return SelectionScore(pair_index, h_in_src, h_out_src, h_in_tgt, h_out_tgt, score)


def _check_quad_languages(corpus: ParallelCorpus, quad: LmQuad) -> None:
    if quad.src_lang is not None and quad.src_lang != corpus.source_lang:
        raise SelectionConfigError(
            f"quad source language {quad.src_lang!r} != corpus {corpus.source_lang!r}"
        )
    if quad.tgt_lang is not None and quad.tgt_lang != corpus.target_lang:
        raise SelectionConfigError(
            f"quad target language {quad.tgt_lang!r} != corpus {corpus.target_lang!r}"
        )


def score_corpus(corpus: ParallelCorpus, quad: LmQuad) -> list[SelectionScore]:
    """Score every pair, in corpus order."""
    _check_quad_languages(corpus, quad)
    return [score_bilingual(pair, quad, i) for i, pair in enumerate(corpus)]


def rank_indices(scores: Sequence[SelectionScore]) -> list[int]:
    """Pair indices sorted by (score, original index), ascending."""
    return sorted(range(len(scores)), key=lambda i: (scores[i].score, scores[i].pair_index))


def select_top(
    corpus: ParallelCorpus, quad: LmQuad, n: int
) -> tuple[ParallelCorpus, list[SelectionScore]]:
    """The n lowest-scoring pairs, ascending by score, plus the full table."""
    if n < 0:
        raise ValueError("n must be >= 0")
    scores = score_corpus(corpus, quad)
    chosen = rank_indices(scores)[: min(n, len(scores))]
    pairs = tuple(corpus[i] for i in chosen)
    return ParallelCorpus(pairs, corpus.source_lang, corpus.target_lang), scores


def write_score_table(scores: Sequence[SelectionScore], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(SelectionScore.TSV_HEADER + "\n")
        for score in scores:
            handle.write(score.to_tsv() + "\n")


def copy_augment(
    mono_target: Iterable[str],
    provenance_label: str,
    *,
    source_lang: str,
    target_lang: str,
) -> ParallelCorpus:
    """Synthetic pairs that copy each target segment onto the source side.

    The language pair labels the system the corpus will augment; the
    source text is knowingly target-language material.
    """
    pairs = []
    for line in mono_target:
        segment = Segment.from_text(line)
        pairs.append(SegmentPair(segment, segment, provenance_label))
    return ParallelCorpus(tuple(pairs), source_lang, target_lang)


def _is_copy_corpus(corpus: ParallelCorpus) -> bool:
    return len(corpus) > 0 and all(p.source.text == p.target.text for p in corpus)


def build_finetune_set(
    base: ParallelCorpus,
    additions: Sequence[ParallelCorpus],
    seed: int,
) -> ParallelCorpus:
    """Concatenate base and additions, then shuffle deterministically.

    Additions must match the base language pair; a corpus whose every
    pair copies target to source is exempt from the source-language
    check, since its source side is really target-language text.
    """
    for i, addition in enumerate(additions):
        if addition.target_lang != base.target_lang:
            raise SelectionConfigError(
                f"addition {i} targets {addition.target_lang!r}, base targets "
                f"{base.target_lang!r}"
            )
        if addition.source_lang != base.source_lang and not _is_copy_corpus(addition):
            raise SelectionConfigError(
                f"addition {i} has source language {addition.source_lang!r}, "
                f"base has {base.source_lang!r}"
            )
    combined = list(base.pairs)
    for addition in additions:
        combined.extend(addition.pairs)
    random.Random(seed).shuffle(combined)
    return ParallelCorpus(tuple(combined), base.source_lang, base.target_lang)
