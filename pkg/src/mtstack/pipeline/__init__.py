"""Reversible text pre/post-processing chain and its component stages."""

from .chain import (
    PipelineError,
    PipelineModels,
    PipelineState,
    postprocess,
    preprocess,
    spellcheck_hook,
)
from .compounds import (
    CompoundLexicon,
    LexiconError,
    rejoin_compounds,
    split_compounds,
)
from .mask import (
    PlaceholderMap,
    ReinstatementError,
    mask_entities,
    unmask_entities,
)
from .normalize import normalize_chars
from .sentences import split_sentences
from .tokenizer import detokenize, tokenize
from .truecase import (
    DETRUECASE,
    TRUECASE,
    TruecaseModel,
    load_truecaser,
    recase,
    save_truecaser,
    train_truecaser,
)

__all__ = [
    "CompoundLexicon",
    "DETRUECASE",
    "LexiconError",
    "PipelineError",
    "PipelineModels",
    "PipelineState",
    "PlaceholderMap",
    "ReinstatementError",
    "TRUECASE",
    "TruecaseModel",
    "detokenize",
    "load_truecaser",
    "mask_entities",
    "normalize_chars",
    "postprocess",
    "preprocess",
    "recase",
    "rejoin_compounds",
    "save_truecaser",
    "spellcheck_hook",
    "split_compounds",
    "split_sentences",
    "tokenize",
    "train_truecaser",
    "unmask_entities",
]
