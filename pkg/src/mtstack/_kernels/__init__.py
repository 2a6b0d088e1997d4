"""Kernel backend selection.

Prefers the compiled Cython extension when it is importable; otherwise the
pure-Python fallback is used.  Setting the environment variable
``MTSTACK_PURE_PYTHON=1`` forces the fallback, which is handy for
benchmarking and for debugging suspected extension issues.
"""

import os

if os.environ.get("MTSTACK_PURE_PYTHON"):
    from . import _pyimpl as _impl
    BACKEND = "python"
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        from . import _pyimpl as _impl
        BACKEND = "python"

count_token_ngrams = _impl.count_token_ngrams
count_char_ngrams = _impl.count_char_ngrams
count_adjacent_pairs = _impl.count_adjacent_pairs
apply_merges = _impl.apply_merges
sequence_log2prob = _impl.sequence_log2prob

__all__ = [
    "BACKEND",
    "count_token_ngrams",
    "count_char_ngrams",
    "count_adjacent_pairs",
    "apply_merges",
    "sequence_log2prob",
]
