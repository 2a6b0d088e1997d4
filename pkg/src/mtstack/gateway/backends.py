"""Translation backend interface and the deterministic mock engines.

A backend turns a batch of preprocessed lines into a batch of translated
lines of the same length, leaving placeholder tokens intact.  The real
neural decoder lives behind this interface on the GPU workers; the mocks
stand in for it everywhere tests need a worker.
"""

from __future__ import annotations

from typing import Protocol, Sequence

from ..markers import contains_placeholder

MOCK_MODES = ("identity", "token_reverse", "lexicon")


class BackendError(RuntimeError):
    """The backend could not produce a translation batch."""


class EngineBackend(Protocol):
    def translate(self, lines: Sequence[str], pair: tuple[str, str]) -> list[str]:
        """Translate a batch, preserving its length."""


class _IdentityBackend:
    mode = "identity"

    def translate(self, lines: Sequence[str], pair: tuple[str, str]) -> list[str]:
        return list(lines)


class _TokenReverseBackend:
    mode = "token_reverse"

    def translate(self, lines: Sequence[str], pair: tuple[str, str]) -> list[str]:
        return [" ".join(reversed(line.split())) for line in lines]


class _LexiconBackend:
    mode = "lexicon"

    def __init__(self, table: dict[str, str]):
        self.table = dict(table)

    def translate(self, lines: Sequence[str], pair: tuple[str, str]) -> list[str]:
        out = []
        for line in lines:
            tokens = [
                token if contains_placeholder(token) else self.table.get(token, token)
                for token in line.split()
            ]
            out.append(" ".join(tokens))
        return out


def mock_backend(mode: str, lexicon_table: dict[str, str] | None = None) -> EngineBackend:
    """A deterministic stand-in engine: identity, token_reverse, or lexicon."""
    if mode == "identity":
        return _IdentityBackend()
    if mode == "token_reverse":
        return _TokenReverseBackend()
    if mode == "lexicon":
        if lexicon_table is None:
            raise ValueError("lexicon mode needs a substitution table")
        return _LexiconBackend(lexicon_table)
    raise ValueError(f"unknown mock backend mode: {mode!r}")
