"""String-based answer metrics: ROUGE-L, Sem-F1, Sem-Rec and the combined score.

All public scores are percentages in ``[0, 100]``. ``token_f1`` alone returns
a fraction, matching its SQuAD-style use as a building block.

Conventions the metrics rely on:

* A source quoted by neither hypothesis nor reference scores F1 = 1 for that
  source (both agree it is unused).
* Sem-Rec bundles all short answers of one reference for one source into a
  single token multiset and takes the max over references. The per-answer
  reading is available with ``granularity="answer"``.
* ROUGE-L is computed on the whole answer as one token sequence, no stemming.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass, field

import numpy as np

from . import kernels
from .markup import QuotedAnswer, psi_k, strip_marks
from .textnorm import normalize_tokens

METRIC_NAMES = ("rouge_l", "sem_f1", "sem_rec", "semqa")


class EmptyReferenceList(ValueError):
    pass


class NonpositiveK(ValueError):
    pass


class EmptyShortAnswerSets(ValueError):
    pass


class OutOfRangeInput(ValueError):
    pass


class EmptyValues(ValueError):
    pass


def lcs_length(x: Sequence[str], y: Sequence[str]) -> int:
    return kernels.lcs_length(x, y)


def _f_measure(overlap: float, n_pred: int, n_gold: int) -> float:
    p = overlap / n_pred if n_pred else 0.0
    r = overlap / n_gold if n_gold else 0.0
    return 2 * p * r / (p + r) if p + r else 0.0


def rouge_l(hypothesis: str, references: Sequence[str]) -> float:
    """ROUGE-L F-measure against the best-matching reference, in percent."""
    if not references:
        raise EmptyReferenceList("rouge_l needs at least one reference")
    hyp = normalize_tokens(hypothesis)
    best = 0.0
    for ref_text in references:
        ref = normalize_tokens(ref_text)
        if not hyp and not ref:
            return 100.0
        best = max(best, _f_measure(lcs_length(hyp, ref), len(hyp), len(ref)))
    return 100.0 * best


def token_f1(predicted: Sequence[str], gold: Sequence[str]) -> float:
    if not predicted and not gold:
        return 1.0
    if not predicted or not gold:
        return 0.0
    overlap = sum((Counter(predicted) & Counter(gold)).values())
    return _f_measure(overlap, len(predicted), len(gold))


def _check_k(k: int) -> None:
    if k < 1:
        raise NonpositiveK(f"K must be >= 1, got {k}")


def sem_f1(hypothesis: QuotedAnswer, references: Sequence[QuotedAnswer], k: int) -> float:
    """Per-source token F1 of quoted spans, max over references, averaged over sources."""
    _check_k(k)
    if not references:
        raise EmptyReferenceList("sem_f1 needs at least one reference")
    total = 0.0
    for src in range(1, k + 1):
        hyp = normalize_tokens(psi_k(hypothesis, src))
        total += max(token_f1(hyp, normalize_tokens(psi_k(r, src))) for r in references)
    return 100.0 * total / k


def _recall(gold: Counter, hyp: Counter) -> float:
    n = sum(gold.values())
    if n == 0:
        return 1.0
    return sum((gold & hyp).values()) / n


def sem_rec(
    hypothesis: QuotedAnswer,
    short_answers: Sequence[Sequence[Iterable[str]]],
    k: int,
    granularity: str = "bundle",
) -> float:
    """Short-answer token recall inside each source's quoted spans, in percent.

    ``short_answers[r][s]`` holds the short answers for source ``s + 1`` in
    reference ``r``; missing trailing sources count as empty.
    """
    _check_k(k)
    if not short_answers:
        raise EmptyShortAnswerSets("sem_rec needs at least one reference entry")
    if granularity not in ("bundle", "answer"):
        raise ValueError(f"unknown granularity {granularity!r}")
    total = 0.0
    for src in range(1, k + 1):
        hyp = Counter(normalize_tokens(psi_k(hypothesis, src)))
        per_ref = [list(ref[src - 1]) if src <= len(ref) else [] for ref in short_answers]
        if granularity == "bundle":
            golds = [Counter(normalize_tokens(" ".join(answers))) for answers in per_ref]
        else:
            golds = [Counter(normalize_tokens(a)) for answers in per_ref for a in answers]
            golds = golds or [Counter()]
        total += max(_recall(g, hyp) for g in golds)
    return 100.0 * total / k


def semqa_score(sem_f1: float, rouge_l: float) -> float:
    """Geometric mean of Sem-F1 and ROUGE-L."""
    for name, v in (("sem_f1", sem_f1), ("rouge_l", rouge_l)):
        if not 0.0 <= v <= 100.0:
            raise OutOfRangeInput(f"{name}={v} outside [0, 100]")
    return math.sqrt(sem_f1 * rouge_l)


def bootstrap_ci(
    values: Sequence[float],
    resamples: int = 1000,
    confidence: float = 0.95,
    seed: int = 0,
) -> tuple[float, float]:
    """Percentile bootstrap interval of the mean (linear interpolation)."""
    if len(values) == 0:
        raise EmptyValues("bootstrap_ci needs at least one value")
    if resamples < 1:
        raise ValueError("resamples must be >= 1")
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must be in (0, 1)")
    data = np.asarray(values, dtype=float)
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, len(data), size=(resamples, len(data)))
    means = data[idx].mean(axis=1)
    alpha = (1.0 - confidence) / 2.0
    low, high = np.percentile(means, [100 * alpha, 100 * (1 - alpha)], method="linear")
    return float(low), float(high)


@dataclass
class ExampleScores:
    example_id: str
    rouge_l: float
    sem_f1: float
    sem_rec: float
    semqa: float
    parse_warnings: int = 0


@dataclass
class MetricReport:
    per_example: list[ExampleScores]
    aggregate: dict[str, float]
    intervals: dict[str, tuple[float, float]] | None = None
    meta: dict = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "aggregate": self.aggregate,
            "intervals": {k: list(v) for k, v in self.intervals.items()} if self.intervals else None,
            "meta": self.meta,
            "per_example": [asdict(r) for r in self.per_example],
        }
        return json.dumps(payload, indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["example_id", *METRIC_NAMES, "parse_warnings"])
        for r in self.per_example:
            writer.writerow(
                [r.example_id, *(f"{getattr(r, m):.2f}" for m in METRIC_NAMES), r.parse_warnings]
            )
        return buf.getvalue()


def score_answer(
    example_id: str,
    hypothesis: QuotedAnswer,
    references: Sequence[QuotedAnswer],
    short_answers: Sequence[Sequence[Iterable[str]]],
    k: int,
    granularity: str = "bundle",
) -> ExampleScores:
    """All four metrics for one hypothesis against one example's references."""
    rl = rouge_l(strip_marks(hypothesis), [strip_marks(r) for r in references])
    sf = sem_f1(hypothesis, references, k)
    sr = sem_rec(hypothesis, short_answers, k, granularity)
    return ExampleScores(
        example_id=example_id,
        rouge_l=rl,
        sem_f1=sf,
        sem_rec=sr,
        semqa=semqa_score(sf, rl),
        parse_warnings=len(hypothesis.warnings),
    )


def aggregate(
    rows: Iterable[ExampleScores],
    bootstrap: int = 0,
    seed: int = 0,
    confidence: float = 0.95,
) -> MetricReport:
    """Unweighted means over examples, sorted by id so ordering never matters."""
    rows = sorted(rows, key=lambda r: r.example_id)
    if rows:
        means = {m: math.fsum(getattr(r, m) for r in rows) / len(rows) for m in METRIC_NAMES}
    else:
        means = {m: 0.0 for m in METRIC_NAMES}
    intervals = None
    if bootstrap and rows:
        intervals = {
            m: bootstrap_ci([getattr(r, m) for r in rows], bootstrap, confidence, seed)
            for m in METRIC_NAMES
        }
    return MetricReport(rows, means, intervals)
