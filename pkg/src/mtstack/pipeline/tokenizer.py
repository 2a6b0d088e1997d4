"""Word/punctuation tokenizer and its exact inverse.

Punctuation is peeled off chunk edges and apostrophes are split by
per-language rules: English contractions keep the apostrophe on the right
part ("don't" -> "don 't"), French/Italian elision keeps it on the left
("l'amico" -> "l' amico"), German and Spanish leave words intact.

detokenize inverts tokenize on character-normalized text with
conventional spacing (single spaces, no space before closing
punctuation, balanced quotes).  Reserved placeholder tokens pass through
both directions untouched because their brackets are not in any peel
set.
"""

from __future__ import annotations

OPENERS = set("([{¿¡")
CLOSERS = set(")]}")
TERMINALS = set(".,;:!?…")
QUOTES = {'"', "'"}

ELISION_LANGS = ("fr", "it")


def _peel(chunk: str) -> tuple[list[str], str, list[str]]:
    left: list[str] = []
    right: list[str] = []
    while chunk:
        ch = chunk[0]
        if ch in OPENERS or ch in QUOTES:
            left.append(ch)
            chunk = chunk[1:]
        else:
            break
    while chunk:
        ch = chunk[-1]
        if ch in CLOSERS or ch in TERMINALS or ch == '"':
            right.append(ch)
            chunk = chunk[:-1]
        elif ch == "'":
            if len(chunk) >= 2 and chunk[-2].isalnum():
                break  # possessive or elision: keep attached
            right.append(ch)
            chunk = chunk[:-1]
        else:
            break
    return left, chunk, right


def _split_apostrophe(core: str, lang: str) -> list[str]:
    if lang == "en":
        for i in range(1, len(core) - 1):
            if core[i] == "'" and core[i - 1].isalnum() and core[i + 1].isalnum():
                return [core[:i], core[i:]]
    elif lang in ELISION_LANGS:
        for i in range(1, len(core) - 1):
            if core[i] == "'" and core[i - 1].isalnum() and core[i + 1].isalnum():
                return [core[:i + 1], core[i + 1:]]
    return [core]


def tokenize(sentence: str, lang: str) -> list[str]:
    """Split one sentence into word and punctuation tokens."""
    tokens: list[str] = []
    for chunk in sentence.split():
        left, core, right = _peel(chunk)
        tokens.extend(left)
        if core:
            tokens.extend(_split_apostrophe(core, lang))
        tokens.extend(reversed(right))
    return tokens


def _glues_left(token: str) -> bool:
    return all(ch in TERMINALS or ch in CLOSERS for ch in token)


def detokenize(tokens: list[str], lang: str) -> str:
    """Reattach punctuation; exact inverse of tokenize on its own output."""
    pieces: list[str] = []
    glue_next = True  # no leading space
    quote_open = {'"': False, "'": False}
    for token in tokens:
        glue = glue_next
        glue_next = False
        if token in QUOTES:
            if quote_open[token]:
                glue = True  # closing quote hugs the word before it
            else:
                glue_next = True  # opening quote hugs the word after it
            quote_open[token] = not quote_open[token]
        elif _glues_left(token):
            glue = True
        elif token in OPENERS:
            glue_next = True
        elif lang == "en" and len(token) > 1 and token[0] == "'" and token[1].isalnum():
            glue = True  # English contraction tail
        if lang in ELISION_LANGS and len(token) > 1 and token[-1] == "'" and token[-2].isalnum():
            glue_next = True  # elided article hugs the next word
        if glue or not pieces:
            pieces.append(token)
        else:
            pieces.append(" " + token)
    return "".join(pieces)
