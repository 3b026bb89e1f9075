"""Lead-k / Tail-k extractive baselines."""

from __future__ import annotations

import enum

from .dataset import Example
from .markup import FreeText, Quote, QuotedAnswer, Segment
from .textnorm import split_sentences


class Mode(enum.Enum):
    LEAD = "lead"
    TAIL = "tail"


def lead_tail_baseline(example: Example, mode: Mode | str, k: int) -> QuotedAnswer:
    """Quote the first (Lead) or last (Tail) ``k`` sentences of every passage.

    Each passage becomes one quote; quotes are separated by a single space.
    """
    mode = Mode(mode)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    segments: list[Segment] = []
    for index, passage in enumerate(example.passages, 1):
        sentences = split_sentences(passage.text)
        picked = sentences[:k] if mode is Mode.LEAD else sentences[-k:]
        if not picked:
            continue
        if segments:
            segments.append(FreeText(" "))
        segments.append(Quote(index, " ".join(picked)))
    return QuotedAnswer(tuple(segments), example.k)
