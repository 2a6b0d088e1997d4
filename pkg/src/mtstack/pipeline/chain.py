"""The full pre/post-processing chain around a translation backend.

Preprocessing order: character normalization, entity masking, sentence
splitting, tokenization, compound splitting (German source only),
truecasing, the spellcheck hook, subword segmentation.  Postprocessing
runs the exact inverses in reverse.  Normalization runs first so every
later stage sees canonical text, and the spell hook sits between casing
and segmentation where it receives whole, cased words.

With an identity backend the round trip reproduces the character
normalized input exactly; the PipelineState captured during
preprocessing carries everything that guarantee needs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from ..bpe import BpeModel, apply_bpe, undo_bpe
from ..corpus import LANGUAGES
from .compounds import CompoundLexicon, rejoin_compounds, split_compounds
from .mask import PlaceholderMap, mask_entities, unmask_entities
from .normalize import normalize_chars
from .sentences import sentence_spans
from .tokenizer import detokenize, tokenize
from .truecase import DETRUECASE, TRUECASE, TruecaseModel, first_alphabetic, recase

COMPOUND_LANG = "de"


class PipelineError(ValueError):
    """The translated lines cannot be matched to the captured state."""


def spellcheck_hook(tokens: Sequence[str], lang: str) -> list[str]:
    """Default correction hook: pass every token through untouched."""
    return list(tokens)


@dataclass
class PipelineModels:
    """Everything a language pair needs beyond the shipped data files.

    Absent models switch their stage off: no truecaser means casing is
    left alone (and not undone), no BPE model means no segmentation.
    """

    truecaser: TruecaseModel | None = None
    bpe: BpeModel | None = None
    compound_lexicon: CompoundLexicon | None = None
    dnt_glossary: tuple[str, ...] = ()
    spellcheck: Callable[[Sequence[str], str], list[str]] = spellcheck_hook


@dataclass
class PipelineState:
    """Per-document record connecting preprocess to postprocess."""

    placeholder_map: PlaceholderMap
    sentence_boundaries: list[tuple[int, int]]
    casing_decisions: list[tuple[int, str, str] | None]
    lang_pair: tuple[str, str]


def _check_pair(lang_pair: Sequence[str]) -> tuple[str, str]:
    source, target = lang_pair
    for lang in (source, target):
        if lang not in LANGUAGES:
            raise ValueError(f"unsupported language: {lang!r}")
    return source, target


def preprocess(
    text: str,
    lang_pair: Sequence[str],
    models: PipelineModels | None = None,
) -> tuple[list[str], PipelineState]:
    """Turn raw text into MT-ready lines plus the state to undo them."""
    source, target = _check_pair(lang_pair)
    if models is None:
        models = PipelineModels()
    normalized = normalize_chars(text, source)
    masked, placeholder_map = mask_entities(normalized, models.dnt_glossary)
    spans = sentence_spans(masked, source)

    lines: list[str] = []
    decisions: list[tuple[int, str, str] | None] = []
    for start, end in spans:
        tokens = tokenize(masked[start:end], source)
        if source == COMPOUND_LANG and models.compound_lexicon is not None:
            split: list[str] = []
            for token in tokens:
                split.extend(split_compounds(token, models.compound_lexicon))
            tokens = split
        decision = None
        if models.truecaser is not None:
            index = first_alphabetic(tokens)
            if index is not None:
                original = tokens[index]
                tokens = recase(tokens, models.truecaser, TRUECASE)
                decision = (index, tokens[index], original)
        decisions.append(decision)
        tokens = models.spellcheck(tokens, source)
        line = " ".join(tokens)
        if models.bpe is not None:
            line = apply_bpe(models.bpe, line)
        lines.append(line)
    state = PipelineState(placeholder_map, spans, decisions, (source, target))
    return lines, state


def postprocess(
    lines: Sequence[str],
    state: PipelineState,
    models: PipelineModels | None = None,
) -> str:
    """Invert the preprocessing chain over translated lines.

    Compound parts are rejoined whatever the target language: a stream
    without joint markers passes through unchanged, and a backend that
    echoes marked source tokens must still come out clean.
    """
    if models is None:
        models = PipelineModels()
    source, target = state.lang_pair
    if len(lines) != len(state.sentence_boundaries):
        raise PipelineError(
            f"{len(lines)} translated lines for "
            f"{len(state.sentence_boundaries)} source sentences"
        )
    sentences = []
    for line, decision in zip(lines, state.casing_decisions):
        if models.bpe is not None:
            line = undo_bpe(line)
        tokens = line.split()
        if decision is not None:
            index, recased_form, original = decision
            if index < len(tokens) and tokens[index] == recased_form:
                tokens[index] = original
            else:
                tokens = recase(tokens, models.truecaser, DETRUECASE)
        tokens = rejoin_compounds(tokens)
        sentences.append(detokenize(tokens, target))
    text = " ".join(sentences)
    return unmask_entities(text, state.placeholder_map)
