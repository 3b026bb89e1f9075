"""Conversions and renderings of quoted answers."""

from __future__ import annotations

import difflib
import enum
import html
import re
from collections.abc import Sequence
from dataclasses import dataclass

from .dataset import Passage
from .markup import IndexOutOfRange, Quote, QuotedAnswer, stripped_layout
from .textnorm import TERMINATORS, sentence_spans


def to_sentence_citations(answer: QuotedAnswer) -> str:
    """Replace span-level quotes with sentence-level ``[k]`` citations.

    Each sentence gets one citation per distinct source whose quotes overlap
    it, in first-appearance order, placed before its terminal punctuation.

    >>> from semqa.markup import parse
    >>> to_sentence_citations(parse("Fans say [ 2 it rocks ] ."))
    'Fans say it rocks [2].'
    """
    text, layout = stripped_layout(answer)
    quotes = [(s, e, seg.source_index) for s, e, seg in layout if isinstance(seg, Quote)]
    if not quotes:
        return text

    pieces = []
    cursor = 0
    for start, end in sentence_spans(text):
        cited: dict[int, None] = {}
        for qs, qe, k in quotes:
            if qs < end and qe > start:
                cited.setdefault(k, None)
        if not cited:
            continue
        marks = "".join(f" [{k}]" for k in cited)
        if text[end - 1] in TERMINATORS:
            body_end = end - 1
            while body_end > start and text[body_end - 1].isspace():
                body_end -= 1
            pieces.append(text[cursor:body_end] + marks + text[end - 1])
        else:
            pieces.append(text[cursor:end] + marks)
        cursor = end
    pieces.append(text[cursor:])
    return "".join(pieces)


class Target(enum.Enum):
    ANSI = "ansi"
    HTML = "html"


# (ANSI background code, CSS colour); index k uses entry (k - 1) % 8.
PALETTE = (
    ("43", "#fde68a"),
    ("46", "#a5f3fc"),
    ("45", "#f5d0fe"),
    ("42", "#bbf7d0"),
    ("103", "#fef08a"),
    ("104", "#bfdbfe"),
    ("101", "#fecaca"),
    ("102", "#d9f99d"),
)

STYLESHEET = "<style>\n" + "".join(
    f".semqa-src-{i + 1} {{ background-color: {css}; border-radius: 3px; }}\n"
    for i, (_, css) in enumerate(PALETTE)
) + "</style>\n"


def _palette_slot(k: int) -> int:
    return (k - 1) % len(PALETTE) + 1


def render(answer: QuotedAnswer, target: Target | str = Target.HTML) -> str:
    """Highlight quotes with a per-source colour; free text is left unstyled."""
    target = Target(target)
    if target is Target.ANSI:
        out = []
        for seg in answer.segments:
            if isinstance(seg, Quote):
                code = PALETTE[_palette_slot(seg.source_index) - 1][0]
                out.append(f"\x1b[{code}m{seg.text}\x1b[0m")
            else:
                out.append(seg.text)
        return "".join(out)

    out = []
    for seg in answer.segments:
        if isinstance(seg, Quote):
            slot = _palette_slot(seg.source_index)
            out.append(
                f'<span class="semqa-src-{slot}" data-source="{seg.source_index}">'
                f"{html.escape(seg.text)}</span>"
            )
        else:
            out.append(html.escape(seg.text))
    return STYLESHEET + '<p class="semqa-answer">' + "".join(out) + "</p>"


def render_document(items: Sequence[tuple[str, QuotedAnswer]], title: str = "SEMQA answers") -> str:
    """Self-contained HTML page with one rendered answer per ``(heading, answer)``."""
    body = []
    for heading, answer in items:
        fragment = render(answer, Target.HTML).removeprefix(STYLESHEET)
        body.append(f"<section>\n<h2>{html.escape(heading)}</h2>\n{fragment}\n</section>\n")
    return (
        "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n"
        f"<title>{html.escape(title)}</title>\n{STYLESHEET}</head>\n<body>\n"
        + "".join(body)
        + "</body>\n</html>\n"
    )


@dataclass(frozen=True)
class FaithfulnessViolation:
    quote_number: int
    source_index: int
    text: str
    hint_offset: int
    hint_length: int
    found_in: tuple[int, ...]


_WS = re.compile(r"\s+")


def _collapse(text: str) -> str:
    return _WS.sub(" ", text).strip()


def check_faithfulness(answer: QuotedAnswer, passages: Sequence[Passage]) -> list[FaithfulnessViolation]:
    """Report quotes that are not verbatim substrings of their cited passage.

    Comparison is case-sensitive after collapsing whitespace. A violation's
    hint is the start (in the collapsed passage) of the longest common
    substring with the quote; ``found_in`` lists other passages that do
    contain the quote verbatim.
    """
    collapsed = [_collapse(p.text) for p in passages]
    violations = []
    for number, quote in enumerate(answer.quotes):
        if quote.source_index > len(passages):
            raise IndexOutOfRange(number, f"quote cites source {quote.source_index} of {len(passages)}")
        needle = _collapse(quote.text)
        hay = collapsed[quote.source_index - 1]
        if needle in hay:
            continue
        matcher = difflib.SequenceMatcher(None, hay, needle, autojunk=False)
        match = matcher.find_longest_match(0, len(hay), 0, len(needle))
        violations.append(
            FaithfulnessViolation(
                quote_number=number,
                source_index=quote.source_index,
                text=quote.text,
                hint_offset=match.a,
                hint_length=match.size,
                found_in=tuple(i for i, h in enumerate(collapsed, 1) if needle in h),
            )
        )
    return violations
