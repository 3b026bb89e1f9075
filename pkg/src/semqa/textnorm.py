"""Normalization, tokenization and sentence segmentation.

Every metric and baseline goes through these two functions, so changing
either one (including the abbreviation list) changes golden values.
"""

from __future__ import annotations

import sys
import unicodedata

ARTICLES = frozenset({"a", "an", "the"})

# Version 1. Tokens are matched case-sensitively against the text before the
# period; single uppercase letters ("J. Smith", "U.S.") are guarded separately.
ABBREVIATIONS = frozenset(
    {
        "Mr", "Mrs", "Ms", "Dr", "Prof", "Sr", "Jr", "St", "Mt", "Ft",
        "Gen", "Col", "Lt", "Sgt", "Capt", "Cmdr", "Adm", "Gov", "Sen", "Rep",
        "Rev", "Hon", "Pres", "Supt",
        "vs", "etc", "approx", "ca", "cf", "al", "e.g", "i.e",
        "No", "Nos", "Vol", "Fig", "Ch", "Co", "Corp", "Inc", "Ltd", "Bros",
        "Ave", "Blvd", "Rd",
        "Jan", "Feb", "Mar", "Apr", "Aug", "Sep", "Sept", "Oct", "Nov", "Dec",
    }
)

TERMINATORS = ".!?"

_PUNCT_TABLE = {
    cp: None
    for cp in range(sys.maxunicode + 1)
    if unicodedata.category(chr(cp)).startswith("P")
}


def strip_punctuation(text: str) -> str:
    return text.translate(_PUNCT_TABLE)


def normalize_tokens(text: str) -> list[str]:
    """Lowercase, drop Unicode punctuation and English articles, split on whitespace.

    >>> normalize_tokens("The 1991 animated film!")
    ['1991', 'animated', 'film']
    """
    return [t for t in strip_punctuation(text.lower()).split() if t not in ARTICLES]


def _is_guarded_period(text: str, pos: int) -> bool:
    """True if the period at ``pos`` does not end a sentence."""
    if 0 < pos < len(text) - 1 and text[pos - 1].isdigit() and text[pos + 1].isdigit():
        return True
    start = pos
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    token = text[start:pos].lstrip("([{\"'“‘")
    if not token:
        return False
    if token in ABBREVIATIONS:
        return True
    last = token.rsplit(".", 1)[-1]
    return len(last) == 1 and last.isupper()


def sentence_spans(text: str) -> list[tuple[int, int]]:
    """Character ``(start, end)`` offsets of each sentence in ``text``.

    Offsets exclude surrounding whitespace; empty sentences are dropped.
    """
    spans = []
    start = 0
    n = len(text)
    for i, ch in enumerate(text):
        if ch not in TERMINATORS:
            continue
        if i + 1 < n and not text[i + 1].isspace():
            continue
        if ch == "." and _is_guarded_period(text, i):
            continue
        spans.append((start, i + 1))
        start = i + 1
    spans.append((start, n))

    out = []
    for s, e in spans:
        while s < e and text[s].isspace():
            s += 1
        while e > s and text[e - 1].isspace():
            e -= 1
        if e > s:
            out.append((s, e))
    return out


def split_sentences(text: str) -> list[str]:
    """Split on ``.``, ``!`` or ``?`` followed by whitespace or end of text.

    Periods after a known abbreviation, a lone uppercase initial, or between
    two digits are not boundaries. Terminators stay with the left sentence.

    >>> split_sentences("It cost 3.5 million. Done.")
    ['It cost 3.5 million.', 'Done.']
    """
    return [text[s:e] for s, e in sentence_spans(text)]
