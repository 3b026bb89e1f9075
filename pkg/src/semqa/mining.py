"""Dataset-construction filters for multi-answer question mining.

Model scores (QA answerability, semantic answer similarity) are inputs here;
nothing in this module runs a model.
"""

from __future__ import annotations

import enum
import math
import random
from collections import Counter, defaultdict
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

from . import kernels
from .dataset import Passage, question_type
from .textnorm import normalize_tokens

LEVENSHTEIN_MAX = 10
IOU_MIN = 0.75
SEMANTIC_MIN = 0.5
QA_SCORE_MIN = 0.5
MIN_ANSWER_WORDS = 4
QUESTION_MERGE_THRESHOLD = 0.9
PASSAGE_OVERLAP_MAX = 0.4


class MissingScore(ValueError):
    pass


class QuotaTooLarge(ValueError):
    pass


class Trigger(enum.Enum):
    LEVENSHTEIN = "Levenshtein"
    IOU = "IoU"
    SEMANTIC = "Semantic"


@dataclass(frozen=True)
class SimilarityVerdict:
    triggered_by: frozenset[Trigger] = frozenset()

    @property
    def similar(self) -> bool:
        return bool(self.triggered_by)

    def __bool__(self) -> bool:
        return self.similar


@dataclass
class TripletRecord:
    question: str
    passage: Passage
    short_answer: str
    page_id: str
    qa_score: float | None = None
    semantic_sim: dict[tuple[str, str], float] = field(default_factory=dict)

    def __post_init__(self):
        if self.qa_score is not None and not 0.0 <= self.qa_score <= 1.0:
            raise ValueError(f"qa_score {self.qa_score} outside [0, 1]")


def levenshtein(x: str, y: str) -> int:
    return kernels.levenshtein(x, y)


def word_iou(x: str, y: str) -> float:
    sx, sy = set(normalize_tokens(x)), set(normalize_tokens(y))
    if not sx and not sy:
        return 1.0
    return len(sx & sy) / len(sx | sy)


def phi(x: str, y: str, semantic_score: float | None = None) -> SimilarityVerdict:
    """Binary answer similarity: small edit distance, high word IoU, or a high external score."""
    if semantic_score is not None and not 0.0 <= semantic_score <= 1.0:
        raise ValueError(f"semantic_score {semantic_score} outside [0, 1]")
    triggers = set()
    if levenshtein(x, y) <= LEVENSHTEIN_MAX:
        triggers.add(Trigger.LEVENSHTEIN)
    if word_iou(x, y) > IOU_MIN:
        triggers.add(Trigger.IOU)
    if semantic_score is not None and semantic_score > SEMANTIC_MIN:
        triggers.add(Trigger.SEMANTIC)
    return SimilarityVerdict(frozenset(triggers))


PairScores = Mapping[tuple[str, str], float]


def _pair_score(scores: PairScores, x: str, y: str) -> float | None:
    value = scores.get((x, y))
    return scores.get((y, x)) if value is None else value


def dedup_answers(
    candidates: Sequence[TripletRecord],
    pair_scores: PairScores | None = None,
    min_words: int = MIN_ANSWER_WORDS,
    min_score: float = QA_SCORE_MIN,
) -> list[TripletRecord]:
    """Filter one question's candidate (passage, answer) pairs.

    Candidates scoring below ``min_score`` are dropped, the rest are visited in
    descending score order (input order breaks ties) and a candidate is dropped
    when its page was already kept, its answer has fewer than ``min_words``
    words, its answer appears (case-insensitively) in a kept passage, or it is
    similar to a kept answer. Semantic scores come from ``pair_scores`` or the
    candidate's own ``semantic_sim``.
    """
    for c in candidates:
        if c.qa_score is None:
            raise MissingScore(f"candidate {c.short_answer!r} has no qa_score")
    ranked = sorted(
        (c for c in candidates if c.qa_score >= min_score),
        key=lambda c: -c.qa_score,
    )
    kept: list[TripletRecord] = []
    pages: set[str] = set()
    for cand in ranked:
        if cand.page_id in pages:
            continue
        if len(cand.short_answer.split()) < min_words:
            continue
        answer_lower = cand.short_answer.lower()
        if any(answer_lower in k.passage.text.lower() for k in kept):
            continue
        duplicate = False
        for k in kept:
            score = None
            if pair_scores is not None:
                score = _pair_score(pair_scores, cand.short_answer, k.short_answer)
            if score is None:
                score = _pair_score(cand.semantic_sim, cand.short_answer, k.short_answer)
            if phi(cand.short_answer, k.short_answer, score):
                duplicate = True
                break
        if duplicate:
            continue
        kept.append(cand)
        pages.add(cand.page_id)
    return kept


class TfidfIndex:
    """Sparse TF-IDF vectors over :func:`normalize_tokens` vocabulary.

    ``tf`` is the raw count, ``idf = ln((1 + N) / (1 + df)) + 1`` and vectors
    are L2-normalized, so the dot product is the cosine similarity.
    """

    def __init__(self, documents: Sequence[str]):
        self.n_docs = len(documents)
        tokenized = [normalize_tokens(d) for d in documents]
        df: Counter[str] = Counter()
        for toks in tokenized:
            df.update(set(toks))
        self.idf = {t: math.log((1 + self.n_docs) / (1 + n)) + 1.0 for t, n in df.items()}
        self.vectors = [self._weigh(toks) for toks in tokenized]

    def _weigh(self, tokens: Sequence[str]) -> dict[str, float]:
        counts = Counter(t for t in tokens if t in self.idf)
        vec = {t: c * self.idf[t] for t, c in counts.items()}
        norm = math.sqrt(math.fsum(v * v for v in vec.values()))
        return {t: v / norm for t, v in vec.items()} if norm else {}

    def transform(self, text: str) -> dict[str, float]:
        return self._weigh(normalize_tokens(text))

    @staticmethod
    def cosine(a: Mapping[str, float], b: Mapping[str, float]) -> float:
        if len(a) > len(b):
            a, b = b, a
        return math.fsum(v * b[t] for t, v in a.items() if t in b)

    def similarities(self, text: str) -> list[float]:
        query = self.transform(text)
        return [self.cosine(query, v) for v in self.vectors]


def merge_questions(questions: Sequence[str], threshold: float = QUESTION_MERGE_THRESHOLD) -> list[list[int]]:
    """Group questions whose TF-IDF cosine exceeds ``threshold`` (transitively)."""
    if not questions:
        raise ValueError("merge_questions needs at least one question")
    index = TfidfIndex(questions)
    parent = list(range(len(questions)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    postings: dict[str, list[int]] = defaultdict(list)
    for i, vec in enumerate(index.vectors):
        for t in vec:
            postings[t].append(i)
    for i, vec in enumerate(index.vectors):
        candidates = {j for t in vec for j in postings[t] if j > i}
        for j in sorted(candidates):
            if index.cosine(vec, index.vectors[j]) > threshold:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(len(questions)):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


def passage_overlap(p1: Passage, p2: Passage) -> float:
    """Shared word types divided by the smaller passage's word-type count."""
    s1, s2 = set(normalize_tokens(p1.text)), set(normalize_tokens(p2.text))
    if not s1 or not s2:
        return 0.0
    return len(s1 & s2) / min(len(s1), len(s2))


def filter_overlapping_passages(
    records: Sequence[TripletRecord], max_overlap: float = PASSAGE_OVERLAP_MAX
) -> list[TripletRecord]:
    """Keep records in order, dropping any whose passage overlaps a kept one too much."""
    kept: list[TripletRecord] = []
    for rec in records:
        if all(passage_overlap(rec.passage, k.passage) <= max_overlap for k in kept):
            kept.append(rec)
    return kept


def balanced_sample(
    items: Sequence[tuple[str, int, Any]],
    quota: int,
    seed: int = 0,
) -> list[tuple[str, int, Any]]:
    """Round-robin over (question type, answer count) cells, one seeded draw per visit."""
    if quota > len(items):
        raise QuotaTooLarge(f"quota {quota} exceeds {len(items)} items")
    rng = random.Random(seed)
    cells: dict[tuple[str, int], list] = defaultdict(list)
    for item in items:
        cells[(item[0], item[1])].append(item)
    order = sorted(cells)
    out = []
    while len(out) < quota:
        for key in order:
            pool = cells[key]
            if not pool:
                continue
            out.append(pool.pop(rng.randrange(len(pool))))
            if len(out) == quota:
                break
    return out


@dataclass
class MinedQuestion:
    question: str
    answers: list[TripletRecord]
    merged_from: list[str] = field(default_factory=list)

    def mean_score(self) -> float | None:
        scores = [a.qa_score for a in self.answers if a.qa_score is not None]
        return sum(scores) / len(scores) if scores else None


def _representative(questions: Sequence[str], kept_by_question: Mapping[str, list[TripletRecord]]) -> str:
    """Question with the highest mean kept-answer score; lexicographic fallback."""
    def mean(q: str) -> float | None:
        scores = [a.qa_score for a in kept_by_question.get(q, []) if a.qa_score is not None]
        return sum(scores) / len(scores) if scores else None

    scored = [(mean(q), q) for q in questions]
    if all(m is None for m, _ in scored):
        return min(questions)
    return min(scored, key=lambda mq: (-(mq[0] if mq[0] is not None else -1.0), mq[1]))[1]


def mine_questions(
    records: Sequence[TripletRecord],
    pair_scores: PairScores | None = None,
    merge_threshold: float = QUESTION_MERGE_THRESHOLD,
    min_words: int = MIN_ANSWER_WORDS,
    min_answers: int = 2,
    dedup: Callable[..., list[TripletRecord]] = dedup_answers,
) -> list[MinedQuestion]:
    """Group triplets by question, filter answers, merge near-duplicate questions.

    Merged questions pool their candidates and are filtered again. Output is
    sorted by question text.
    """
    by_question: dict[str, list[TripletRecord]] = defaultdict(list)
    for rec in records:
        by_question[rec.question].append(rec)
    questions = sorted(by_question)
    if not questions:
        return []
    kept = {q: dedup(by_question[q], pair_scores, min_words=min_words) for q in questions}

    mined = []
    for group in merge_questions(questions, merge_threshold):
        members = [questions[i] for i in group]
        if len(members) == 1:
            answers = kept[members[0]]
        else:
            pooled = [rec for q in members for rec in by_question[q]]
            answers = dedup(pooled, pair_scores, min_words=min_words)
        if len(answers) < min_answers:
            continue
        rep = _representative(members, kept)
        mined.append(MinedQuestion(rep, answers, [q for q in members if q != rep]))
    mined.sort(key=lambda m: m.question)
    return mined


def mined_to_json(mined: MinedQuestion, ex_id: str, origin: str = "PAQ") -> dict:
    """Dataset-schema record without the ``answers`` field.

    ``short_answers`` holds a single pseudo-reference listing each kept
    passage's short answer.
    """
    return {
        "id": ex_id,
        "question": mined.question,
        "origin": origin,
        "question_type": question_type(mined.question),
        "passages": [{"title": a.passage.title, "text": a.passage.text} for a in mined.answers],
        "short_answers": [[[a.short_answer] for a in mined.answers]],
        "merged_from": mined.merged_from,
    }
