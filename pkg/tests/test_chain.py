"""End-to-end pre/post-processing round trips under mock backends."""

import random

import pytest

from mtstack.bpe import learn_bpe
from mtstack.markers import BPE_SEPARATOR, COMPOUND_JOINT, PLACEHOLDER_OPEN
from mtstack.pipeline import (
    CompoundLexicon,
    PipelineError,
    PipelineModels,
    normalize_chars,
    postprocess,
    preprocess,
    tokenize,
    train_truecaser,
)

GLOSSARY = ("COVID-19", "WHO")

WORD_POOL = {
    "en": [
        "the", "virus", "spread", "fast", "doctors", "warned", "people",
        "stayed", "home", "cases", "fell", "don't", "we", "saw", "results",
    ],
    "fr": [
        "le", "virus", "se", "propage", "vite", "les", "médecins", "ont",
        "prévenu", "l'ampleur", "reste", "faible", "nous", "restons",
    ],
    "de": [
        "das", "Virus", "breitet", "sich", "aus", "die", "Grundrechte",
        "gelten", "immer", "Krankenhaus", "Masken", "helfen", "wir",
        "bleiben", "zuhause",
    ],
    "it": [
        "il", "virus", "si", "diffonde", "l'ospedale", "resta", "aperto",
        "i", "medici", "avvertono", "mascherine", "aiutano",
    ],
    "es": [
        "el", "virus", "se", "extiende", "los", "médicos", "avisan",
        "mascarillas", "ayudan", "casos", "bajan", "quedamos", "en", "casa",
    ],
}

ENTITIES = [
    "https://who.int/data?id=19",
    "www.cdc.gov",
    "COVID-19",
    "WHO",
]

DE_LEXICON = CompoundLexicon({
    "grund": 900, "rechte": 800, "kranken": 700, "haus": 1200,
    "masken": 600, "schutz": 500, "virus": 400, "zuhause": 300,
})


def build_sentence(rng, lang):
    words = WORD_POOL[lang]
    parts = [rng.choice(words).capitalize()]
    for _ in range(rng.randint(2, 7)):
        word = rng.choice(words)
        if rng.random() < 0.12:
            word += ","
        parts.append(word)
    if rng.random() < 0.3:
        parts.append(rng.choice(ENTITIES))
    if rng.random() < 0.15:
        quoted = rng.choice(words)
        parts.append('“' + quoted + '”')
    if rng.random() < 0.1:
        parts.append("<b>" + rng.choice(words) + "</b>")
    return " ".join(parts) + rng.choice(".!?")


def build_document(rng, lang):
    return " ".join(build_sentence(rng, lang) for _ in range(rng.randint(1, 4)))


def models_for(rng, src, tgt):
    mono = [" ".join(tokenize(build_sentence(rng, src), src)) for _ in range(200)]
    truecaser = train_truecaser(mono, src)
    bpe_lines = [build_sentence(rng, src) for _ in range(120)]
    bpe_lines += [build_sentence(rng, tgt) for _ in range(120)]
    bpe = learn_bpe(bpe_lines, 150)
    lexicon = DE_LEXICON if src == "de" or tgt == "de" else None
    return PipelineModels(
        truecaser=truecaser,
        bpe=bpe,
        compound_lexicon=lexicon,
        dnt_glossary=GLOSSARY,
    )


def test_identity_backend_simple():
    lines, state = preprocess("Hello world.", ("en", "fr"))
    assert lines == ["Hello world ."]
    assert postprocess(lines, state) == "Hello world."


def test_identity_backend_preserves_url_bytes():
    text = "Figures at https://who.int/data?id=19 updated."
    lines, state = preprocess(text, ("en", "de"))
    assert "https://who.int" not in lines[0]
    assert postprocess(lines, state) == text


def test_multi_sentence_document():
    text = "It began quietly. Cases rose. Then policy changed."
    lines, state = preprocess(text, ("en", "es"))
    assert len(lines) == 3
    assert postprocess(lines, state) == text


def test_master_round_trip_over_mixed_fixture():
    # An identity backend hands back source-language tokens, so the pair
    # must share its conventions on both sides for detokenization to be
    # the exact inverse; every language gets its own matched pair.
    rng = random.Random(1234)
    pairs = [(lang, lang) for lang in ("en", "fr", "de", "it", "es")]
    models = {pair: models_for(rng, *pair) for pair in pairs}
    checked = 0
    for i in range(420):
        pair = pairs[i % len(pairs)]
        text = build_document(rng, pair[0])
        lines, state = preprocess(text, pair, models[pair])
        restored = postprocess(lines, state, models[pair])
        assert restored == normalize_chars(text, pair[0]), (pair, text)
        checked += len(state.sentence_boundaries)
    assert checked >= 1000


def test_compound_splitting_round_trip():
    models = PipelineModels(compound_lexicon=DE_LEXICON)
    text = "Die Grundrechte gelten im Krankenhaus."
    lines, state = preprocess(text, ("de", "en"), models)
    assert f"Grund{COMPOUND_JOINT} rechte" in lines[0]
    assert f"Kranken{COMPOUND_JOINT} haus" in lines[0]
    assert postprocess(lines, state, models) == text


def test_compound_rejoin_when_target_german():
    models = PipelineModels(compound_lexicon=DE_LEXICON)
    lines, state = preprocess("Hospitals filled.", ("en", "de"), models)

    def backend(_lines):
        return [f"Kranken{COMPOUND_JOINT} haus füllte sich ."]

    out = postprocess(backend(lines), state, models)
    assert out == "Krankenhaus füllte sich."


def test_translation_backend_gets_detruecased():
    corpus = ["x the charts y .", "x the charts y ."]
    models = PipelineModels(truecaser=train_truecaser(corpus, "en"))
    lines, state = preprocess("The charts rose.", ("en", "fr"), models)
    assert lines == ["the charts rose ."]
    out = postprocess(["bonjour le monde ."], state, models)
    assert out == "Bonjour le monde."


def test_without_truecaser_casing_untouched():
    lines, state = preprocess("lowercase start stays.", ("en", "fr"))
    assert postprocess(lines, state) == "lowercase start stays."


def test_spellcheck_hook_wiring():
    calls = []

    def fixer(tokens, lang):
        calls.append((tuple(tokens), lang))
        return ["the" if t == "teh" else t for t in tokens]

    models = PipelineModels(spellcheck=fixer)
    lines, _ = preprocess("teh case count grows. 9 said so.", ("en", "it"), models)
    assert len(calls) == 2
    assert all(lang == "en" for _, lang in calls)
    assert lines[0].startswith("the ")
    assert "teh" not in " ".join(lines)


def test_default_hook_changes_nothing():
    text = "Plain sentence for comparison."
    explicit = PipelineModels(spellcheck=lambda tokens, lang: list(tokens))
    lines_a, _ = preprocess(text, ("en", "fr"))
    lines_b, _ = preprocess(text, ("en", "fr"), explicit)
    assert lines_a == lines_b


def test_line_count_mismatch_raises():
    lines, state = preprocess("One. Two.", ("en", "fr"))
    assert len(lines) == 2
    with pytest.raises(PipelineError):
        postprocess(lines[:1], state)


def test_unsupported_language_rejected():
    with pytest.raises(ValueError):
        preprocess("ola", ("en", "pt"))


def test_marker_families_are_disjoint():
    assert BPE_SEPARATOR not in COMPOUND_JOINT
    assert COMPOUND_JOINT not in BPE_SEPARATOR
    assert PLACEHOLDER_OPEN not in BPE_SEPARATOR + COMPOUND_JOINT
