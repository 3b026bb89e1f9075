"""Semi-extractive multi-source QA: quoted-answer markup and string-based evaluation."""

from .kernels import BACKEND
from .markup import (
    FreeText,
    ParseMode,
    Quote,
    QuotedAnswer,
    parse,
    psi_k,
    serialize,
    strip_marks,
)
from .metrics import rouge_l, sem_f1, sem_rec, semqa_score, token_f1
from .textnorm import normalize_tokens, split_sentences

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "FreeText",
    "ParseMode",
    "Quote",
    "QuotedAnswer",
    "normalize_tokens",
    "parse",
    "psi_k",
    "rouge_l",
    "sem_f1",
    "sem_rec",
    "semqa_score",
    "serialize",
    "split_sentences",
    "strip_marks",
    "token_f1",
]
