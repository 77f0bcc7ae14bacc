"""Transcript normalization shared by alignment, decoding, and detection.

The rule set matches character-level ASR vocabularies: uppercase, typographic
apostrophes mapped to ASCII ``'``, every other character outside
``[A-Z' ]`` deleted, whitespace collapsed.
"""

from __future__ import annotations

import re

# U+2019 right single quote, U+2018 left single quote, U+02BC modifier
# apostrophe, U+00B4 acute accent.
_APOSTROPHES = str.maketrans({c: "'" for c in "’‘ʼ´"})
_DISALLOWED = re.compile(r"[^A-Z' ]")


def normalize_text(text: str) -> str:
    text = text.translate(_APOSTROPHES).upper()
    text = _DISALLOWED.sub("", text)
    return " ".join(text.split())


def transcript_labels(text: str, word_delim: str = "|") -> list[str]:
    """Character labels of the normalized text, spaces replaced by the word
    delimiter token."""
    return [word_delim if ch == " " else ch for ch in normalize_text(text)]
