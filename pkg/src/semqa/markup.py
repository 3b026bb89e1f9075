"""Bracketed quoted-answer markup.

An answer interleaves free text with quotes of the form ``[ k span ]`` where
``k`` is the 1-based index of the source passage the span was copied from::

    The song "[ 1 I'll Be Home for Christmas ]" was released by [ 1 Bing Crosby ]

Grammar (no nesting)::

    ANSWER := (TEXT | QUOTE)*
    QUOTE  := "[" WS+ INT WS+ SPAN WS* "]"
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Union


class ParseMode(enum.Enum):
    STRICT = "strict"
    LENIENT = "lenient"


@dataclass(frozen=True)
class FreeText:
    text: str


@dataclass(frozen=True)
class Quote:
    source_index: int
    text: str

    def __post_init__(self):
        if self.source_index < 1:
            raise ValueError(f"source_index must be >= 1, got {self.source_index}")
        if not self.text.strip():
            raise ValueError("quote text must be non-empty")


Segment = Union[FreeText, Quote]


class MarkupError(ValueError):
    """Strict-mode parse failure at character offset ``position``."""

    kind = "MarkupError"

    def __init__(self, position: int, detail: str = ""):
        self.position = position
        self.detail = detail
        msg = f"{self.kind} at offset {position}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class UnmatchedOpenBracket(MarkupError):
    kind = "UnmatchedOpenBracket"


class UnmatchedCloseBracket(MarkupError):
    kind = "UnmatchedCloseBracket"


class MissingIndex(MarkupError):
    kind = "MissingIndex"


class IndexOutOfRange(MarkupError):
    kind = "IndexOutOfRange"


class EmptySpan(MarkupError):
    kind = "EmptySpan"


class NestedQuote(MarkupError):
    kind = "NestedQuote"


@dataclass(frozen=True)
class ParseWarning:
    """A construct that lenient parsing demoted to free text."""

    kind: str
    position: int


@dataclass(frozen=True)
class QuotedAnswer:
    segments: tuple[Segment, ...] = ()
    source_count_hint: int | None = None
    warnings: tuple[ParseWarning, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))

    @property
    def quotes(self) -> list[Quote]:
        return [s for s in self.segments if isinstance(s, Quote)]

    def source_indices(self) -> list[int]:
        """Distinct quoted source indices in first-appearance order."""
        seen: dict[int, None] = {}
        for q in self.quotes:
            seen.setdefault(q.source_index, None)
        return list(seen)


def canonical(answer: QuotedAnswer) -> QuotedAnswer:
    """Trim quote spans, drop empty free text and merge adjacent free text."""
    out: list[Segment] = []
    for seg in answer.segments:
        if isinstance(seg, Quote):
            out.append(Quote(seg.source_index, seg.text.strip()))
        elif seg.text:
            if out and isinstance(out[-1], FreeText):
                out[-1] = FreeText(out[-1].text + seg.text)
            else:
                out.append(seg)
    return QuotedAnswer(tuple(out), answer.source_count_hint, answer.warnings)


_QUOTE_BODY = re.compile(r"\s+([0-9]+)(?:\s+(.*?))?\s*", re.DOTALL)


def parse(
    text: str,
    mode: ParseMode = ParseMode.LENIENT,
    source_count: int | None = None,
) -> QuotedAnswer:
    """Parse markup into a canonical :class:`QuotedAnswer`.

    Strict mode raises a :class:`MarkupError` subclass on the first problem.
    Lenient mode never fails: malformed brackets stay as literal text and
    well-formed quotes with an out-of-range index become free text without
    their delimiters. Each demotion is recorded in ``answer.warnings``.
    """
    strict = mode is ParseMode.STRICT
    segments: list[Segment] = []
    warnings: list[ParseWarning] = []
    buf: list[str] = []

    def demote(kind: str, pos: int, literal: str) -> None:
        if strict:
            raise _ERRORS[kind](pos, repr(literal))
        warnings.append(ParseWarning(kind, pos))
        buf.append(literal)

    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "]":
            demote("UnmatchedCloseBracket", i, ch)
            i += 1
            continue
        if ch != "[":
            j = i
            while j < n and text[j] not in "[]":
                j += 1
            buf.append(text[i:j])
            i = j
            continue

        close = text.find("]", i + 1)
        inner_open = text.find("[", i + 1)
        if close < 0:
            demote("UnmatchedOpenBracket", i, ch)
            i += 1
            continue
        if 0 <= inner_open < close:
            demote("NestedQuote", inner_open, ch)
            i += 1
            continue

        body = text[i + 1 : close]
        raw = text[i : close + 1]
        m = _QUOTE_BODY.fullmatch(body)
        if m is None:
            demote("MissingIndex", i, raw)
            i = close + 1
            continue
        index = int(m.group(1))
        span = m.group(2) or ""
        if not span.strip():
            demote("EmptySpan", i, raw)
        elif index < 1 or (source_count is not None and index > source_count):
            demote("IndexOutOfRange", i, body)
        else:
            if buf:
                segments.append(FreeText("".join(buf)))
                buf.clear()
            segments.append(Quote(index, span.strip()))
        i = close + 1

    if buf:
        segments.append(FreeText("".join(buf)))
    return canonical(QuotedAnswer(tuple(segments), source_count, tuple(warnings)))


_ERRORS: dict[str, type[MarkupError]] = {
    cls.kind: cls
    for cls in (
        UnmatchedOpenBracket,
        UnmatchedCloseBracket,
        MissingIndex,
        IndexOutOfRange,
        EmptySpan,
        NestedQuote,
    )
}


def serialize(answer: QuotedAnswer) -> str:
    parts = []
    for seg in answer.segments:
        if isinstance(seg, Quote):
            parts.append(f"[ {seg.source_index} {seg.text.strip()} ]")
        else:
            parts.append(seg.text)
    return "".join(parts)


def psi_k(answer: QuotedAnswer, k: int) -> str:
    """Text quoted from source ``k``, in document order, joined by spaces."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return " ".join(q.text for q in answer.quotes if q.source_index == k)


def _needs_space(left: str, right: str, quote_quote: bool) -> bool:
    if not left or not right:
        return False
    a, b = left[-1], right[0]
    if a.isspace() or b.isspace():
        return False
    # Quotes glue to adjacent punctuation such as `"` or `,`.
    return quote_quote or (a.isalnum() and b.isalnum())


def stripped_layout(answer: QuotedAnswer) -> tuple[str, list[tuple[int, int, Segment]]]:
    """Plain text of ``answer`` plus the ``(start, end, segment)`` offsets of each segment."""
    out = ""
    layout: list[tuple[int, int, Segment]] = []
    prev: Segment | None = None
    for seg in answer.segments:
        piece = seg.text
        if prev is not None and out:
            if out[-1].isspace():
                piece = piece.lstrip(" ")
            elif (isinstance(seg, Quote) or isinstance(prev, Quote)) and _needs_space(
                out, piece, isinstance(seg, Quote) and isinstance(prev, Quote)
            ):
                out += " "
        layout.append((len(out), len(out) + len(piece), seg))
        out += piece
        prev = seg
    return out, layout


def strip_marks(answer: QuotedAnswer) -> str:
    """Render the answer as plain text with all attribution marks removed.

    >>> strip_marks(parse('[ 1 a ][ 2 b ]'))
    'a b'
    """
    return stripped_layout(answer)[0]
