"""Reserved marker conventions shared across the pipeline.

Three families of reserved strings travel through the processing chain and
must never collide with each other or with natural corpus text:

* the BPE continuation suffix (``@@``) on non-final subword units,
* the compound joint suffix (``⊕``) on non-final compound parts,
* placeholder tokens of the form ``⟦KIND-k⟧`` standing in for
  masked URLs, markup tags and do-not-translate terms.

Everything that needs to recognise one of these imports it from here, so
the disjointness is enforced in exactly one place.
"""

import re

# Suffix appended to every non-final subword unit.
BPE_SEPARATOR = "@@"

# Suffix appended to every non-final part of a split compound.  Distinct
# from the BPE separator so the two segmentations can be undone
# independently and in either order.
COMPOUND_JOINT = "⊕"

# Placeholder tokens use white square brackets, characters that do not
# occur in natural corpus text, so any translation backend passes them
# through untouched.
PLACEHOLDER_OPEN = "⟦"
PLACEHOLDER_CLOSE = "⟧"
PLACEHOLDER_KINDS = ("URL", "TAG", "DNT")

PLACEHOLDER_RE = re.compile(
    re.escape(PLACEHOLDER_OPEN)
    + "(?:" + "|".join(PLACEHOLDER_KINDS) + ")"
    + r"-\d+"
    + re.escape(PLACEHOLDER_CLOSE)
)


def placeholder(kind: str, index: int) -> str:
    """Render the reserved placeholder token for `kind` number `index`."""
    if kind not in PLACEHOLDER_KINDS:
        raise ValueError(f"unknown placeholder kind: {kind!r}")
    return f"{PLACEHOLDER_OPEN}{kind}-{index}{PLACEHOLDER_CLOSE}"


def is_placeholder(token: str) -> bool:
    """True when `token` is exactly one reserved placeholder."""
    return PLACEHOLDER_RE.fullmatch(token) is not None


def contains_placeholder(text: str) -> bool:
    """True when any reserved placeholder occurs inside `text`.

    Adjacent masked entities produce tokens made of several glued
    placeholders; such tokens must be protected as a whole.
    """
    return PLACEHOLDER_RE.search(text) is not None
