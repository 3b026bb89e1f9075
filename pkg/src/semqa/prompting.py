"""Few-shot prompts in the quoted (QSum) and sentence-citation (QSum-S) formats."""

from __future__ import annotations

import enum
import random
from collections.abc import Mapping, Sequence

from .dataset import Example
from .markup import serialize
from .mining import TfidfIndex
from .transform import to_sentence_citations

QSUM_HEADER = (
    "Answer the question by summarizing the given sources while explicitly copying spans "
    "from the sources. When copying a span, use brackets and the respective source number "
    "to indicate that this span was copied. Use explicit copying as much as possible and for "
    "all factual statements, while preserving fluency. Make sure to use all relevant sources "
    "and properly quote them. Here are some examples:"
)
QSUMS_HEADER = (
    "Instruction: Write a high-quality answer for the given question using only the provided "
    "search results and cite them properly using [1][2][3]."
)


class Method(enum.Enum):
    TFIDF = "tfidf"
    PRECOMPUTED = "precomputed"


class Format(enum.Enum):
    QSUM = "qsum"
    QSUMS = "qsum-s"


class NTooLarge(ValueError):
    pass


class MissingScores(ValueError):
    pass


class NoReferences(ValueError):
    pass


def random_scores(train: Sequence[Example], seed: int) -> dict[str, float]:
    """Seeded random similarity scores, for the random-exemplar condition."""
    rng = random.Random(seed)
    return {ex.id: rng.random() for ex in train}


def retrieve_exemplars(
    query_question: str,
    train: Sequence[Example],
    n: int,
    method: Method | str = Method.TFIDF,
    scores: Mapping[str, float] | None = None,
    most_similar_last: bool = True,
) -> list[Example]:
    """Top-``n`` training examples by question similarity.

    Ranking is by descending similarity with ties broken by question text. The
    returned list is in ascending similarity by default, so the closest
    exemplar sits right before the query in the prompt.
    """
    method = Method(method)
    if n > len(train):
        raise NTooLarge(f"asked for {n} exemplars from {len(train)}")
    if n <= 0:
        return []
    if method is Method.TFIDF:
        sims = TfidfIndex([ex.question for ex in train]).similarities(query_question)
    else:
        if scores is None:
            raise MissingScores("precomputed retrieval needs a score per training id")
        try:
            sims = [scores[ex.id] for ex in train]
        except KeyError as exc:
            raise MissingScores(f"no score for training example {exc.args[0]!r}") from None
    order = sorted(range(len(train)), key=lambda i: (-sims[i], train[i].question, i))
    top = [train[i] for i in order[:n]]
    return top[::-1] if most_similar_last else top


def _sources_block(example: Example) -> list[str]:
    return [f" [{i}] {p.title}: {p.text}" for i, p in enumerate(example.passages, 1)]


def build_prompt(
    exemplars: Sequence[Example],
    query: Example,
    format: Format | str = Format.QSUM,
    seed: int = 0,
) -> str:
    """Assemble the instruction header, exemplar blocks and the open query block.

    One reference per exemplar is picked with a seeded RNG.
    """
    fmt = Format(format)
    rng = random.Random(seed)
    label = "Quoted summary:" if fmt is Format.QSUM else "Answer:"
    lines = [QSUM_HEADER if fmt is Format.QSUM else QSUMS_HEADER]
    for ex in exemplars:
        if not ex.answers:
            raise NoReferences(f"exemplar {ex.id!r} has no reference answers")
        answer = ex.answers[rng.randrange(len(ex.answers))]
        text = serialize(answer) if fmt is Format.QSUM else to_sentence_citations(answer)
        lines.append(f"Question: {ex.question}")
        lines.extend(_sources_block(ex))
        lines.append(f"{label} {text}")
        lines.append("")
    lines.append(f"Question: {query.question}")
    lines.extend(_sources_block(query))
    lines.append(label)
    return "\n".join(lines) + "\n"
