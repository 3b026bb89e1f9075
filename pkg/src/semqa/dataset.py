"""QuoteSum-format JSONL: loading, validation, statistics and splits.

One JSON object per line::

    {"id": str, "question": str, "origin": "PAQ" | "NQ",
     "passages": [{"title": str, "text": str}, ...],
     "answers": [markup, ...],
     "short_answers": [[[str, ...] per passage] per answer]}
"""

from __future__ import annotations

import json
import random
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from .markup import MarkupError as _ParseError
from .markup import ParseMode, QuotedAnswer, parse, serialize, strip_marks

ORIGINS = ("PAQ", "NQ")
QUESTION_TYPES = ("what", "who", "where", "when", "how", "which", "why", "stand_for", "other")
MAX_ANSWER_WORDS = 100


class DatasetError(Exception):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class JsonError(DatasetError):
    pass


class MarkupError(DatasetError):
    def __init__(self, line: int, detail: str, kind: str = "MarkupError"):
        self.detail = detail
        self.kind = kind
        super().__init__(line, f"{kind}: {detail}")


class SchemaError(DatasetError):
    def __init__(self, line: int, field_name: str, message: str = "invalid or missing"):
        self.field = field_name
        super().__init__(line, f"field {field_name!r}: {message}")


class InvalidRatios(ValueError):
    pass


@dataclass(frozen=True)
class Passage:
    title: str
    text: str


@dataclass(frozen=True)
class Example:
    id: str
    question: str
    origin: str
    passages: tuple[Passage, ...]
    answers: tuple[QuotedAnswer, ...] = ()
    short_answers: tuple[tuple[tuple[str, ...], ...], ...] = ()

    @property
    def k(self) -> int:
        return len(self.passages)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "question": self.question,
            "origin": self.origin,
            "passages": [{"title": p.title, "text": p.text} for p in self.passages],
            "answers": [serialize(a) for a in self.answers],
            "short_answers": [[list(s) for s in ref] for ref in self.short_answers],
        }


@dataclass
class ValidationReport:
    path: str
    examples: int = 0
    errors: list[dict] = field(default_factory=list)
    warnings: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_json(self) -> str:
        return json.dumps(
            {"path": self.path, "examples": self.examples, "ok": self.ok,
             "errors": self.errors, "warnings": self.warnings},
            indent=2,
        ) + "\n"


def _str_field(obj: dict, name: str, line: int) -> str:
    value = obj.get(name)
    if not isinstance(value, str):
        raise SchemaError(line, name)
    return value


def example_from_json(obj: object, line: int = 0, warnings: list[dict] | None = None) -> Example:
    """Build and validate an :class:`Example` from one decoded JSONL record."""
    if not isinstance(obj, dict):
        raise SchemaError(line, "<root>", "expected a JSON object")
    ex_id = _str_field(obj, "id", line)
    question = _str_field(obj, "question", line)
    origin = obj.get("origin")
    if origin not in ORIGINS:
        raise SchemaError(line, "origin", f"expected one of {ORIGINS}")

    raw_passages = obj.get("passages")
    if not isinstance(raw_passages, list) or len(raw_passages) < 2:
        raise SchemaError(line, "passages", "need a list of at least two passages")
    passages = []
    for p in raw_passages:
        if not isinstance(p, dict) or not isinstance(p.get("title"), str) or not isinstance(p.get("text"), str):
            raise SchemaError(line, "passages", "each passage needs string title and text")
        if not p["text"].strip():
            raise SchemaError(line, "passages", "passage text is empty")
        passages.append(Passage(p["title"], p["text"]))
    k = len(passages)

    raw_answers = obj.get("answers", [])
    if not isinstance(raw_answers, list) or not all(isinstance(a, str) for a in raw_answers):
        raise SchemaError(line, "answers", "expected a list of markup strings")
    answers = []
    for n, text in enumerate(raw_answers):
        try:
            answer = parse(text, ParseMode.STRICT, source_count=k)
        except _ParseError as exc:
            raise MarkupError(line, f"answer {n}: {exc}", exc.kind) from exc
        words = len(strip_marks(answer).split())
        if warnings is not None and words > MAX_ANSWER_WORDS:
            warnings.append({"line": line, "id": ex_id, "answer": n,
                             "warning": f"answer has {words} words (> {MAX_ANSWER_WORDS})"})
        answers.append(answer)

    raw_short = obj.get("short_answers", [])
    if not isinstance(raw_short, list) or len(raw_short) != len(answers):
        raise SchemaError(line, "short_answers", "need one entry per answer")
    short = []
    for ref in raw_short:
        if not isinstance(ref, list) or len(ref) != k:
            raise SchemaError(line, "short_answers", f"each entry needs {k} per-passage lists")
        per_source = []
        for group in ref:
            if not isinstance(group, list) or not all(isinstance(s, str) for s in group):
                raise SchemaError(line, "short_answers", "per-passage entries must be lists of strings")
            per_source.append(tuple(group))
        short.append(tuple(per_source))

    return Example(ex_id, question, origin, tuple(passages), tuple(answers), tuple(short))


def _iter_records(path: Path):
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                yield line_no, json.loads(line)
            except json.JSONDecodeError as exc:
                raise JsonError(line_no, str(exc)) from exc


def load_dataset(path: str | Path, report: ValidationReport | None = None) -> list[Example]:
    """Load a dataset, raising on the first hard error.

    Soft problems (over-long answers) are appended to ``report`` if given.
    """
    warnings = report.warnings if report is not None else None
    examples = [example_from_json(obj, line, warnings) for line, obj in _iter_records(Path(path))]
    if report is not None:
        report.examples = len(examples)
    return examples


def validate_dataset(path: str | Path) -> ValidationReport:
    """Check every line and collect all errors instead of stopping at the first."""
    report = ValidationReport(str(path))
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                example_from_json(json.loads(line), line_no, report.warnings)
                report.examples += 1
            except json.JSONDecodeError as exc:
                report.errors.append({"line": line_no, "type": "JsonError", "message": str(exc)})
            except DatasetError as exc:
                report.errors.append({"line": line_no, "type": getattr(exc, "kind", type(exc).__name__),
                                      "message": str(exc)})
    return report


def dump_dataset(examples: Iterable[Example], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ex in examples:
            fh.write(json.dumps(ex.to_json(), ensure_ascii=False) + "\n")


def question_type(question: str) -> str:
    q = question.strip().lower()
    if "stand for" in q:
        return "stand_for"
    words = q.split()
    first = words[0].strip("\"'¿?,.:;") if words else ""
    return first if first in QUESTION_TYPES[:7] else "other"


@dataclass
class DatasetStats:
    example_count: int = 0
    answer_count: int = 0
    unique_question_count: int = 0
    by_origin: dict[str, int] = field(default_factory=dict)
    question_types: dict[str, int] = field(default_factory=dict)
    sources_per_question: dict[int, int] = field(default_factory=dict)
    references_per_question: dict[int, int] = field(default_factory=dict)
    max_passages: int = 0

    def to_json(self) -> str:
        payload = {
            "example_count": self.example_count,
            "answer_count": self.answer_count,
            "unique_question_count": self.unique_question_count,
            "by_origin": self.by_origin,
            "question_types": self.question_types,
            "sources_per_question": {str(k): v for k, v in self.sources_per_question.items()},
            "references_per_question": {str(k): v for k, v in self.references_per_question.items()},
            "max_passages": self.max_passages,
        }
        return json.dumps(payload, indent=2) + "\n"

    def to_table(self) -> str:
        rows = [
            ("examples", self.example_count),
            ("answers", self.answer_count),
            ("unique questions", self.unique_question_count),
            *((f"origin {o}", n) for o, n in self.by_origin.items()),
            ("max passages", self.max_passages),
            *((f"type {t}", n) for t, n in self.question_types.items()),
            *((f"{k} passages", n) for k, n in self.sources_per_question.items()),
            *((f"{k} references", n) for k, n in self.references_per_question.items()),
        ]
        width = max(len(name) for name, _ in rows)
        return "".join(f"{name:<{width}}  {value:>6}\n" for name, value in rows)


def compute_stats(examples: Sequence[Example]) -> DatasetStats:
    types = Counter(question_type(ex.question) for ex in examples)
    return DatasetStats(
        example_count=len(examples),
        answer_count=sum(len(ex.answers) for ex in examples),
        unique_question_count=len({ex.question for ex in examples}),
        by_origin={o: sum(ex.origin == o for ex in examples) for o in ORIGINS},
        question_types={t: types.get(t, 0) for t in QUESTION_TYPES},
        sources_per_question=dict(sorted(Counter(ex.k for ex in examples).items())),
        references_per_question=dict(sorted(Counter(len(ex.answers) for ex in examples).items())),
        max_passages=max((ex.k for ex in examples), default=0),
    )


def _title_groups(examples: Sequence[Example]) -> list[list[int]]:
    """Connected components of examples that share any passage title."""
    parent = list(range(len(examples)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    owner: dict[str, int] = {}
    for i, ex in enumerate(examples):
        for p in ex.passages:
            j = owner.setdefault(p.title, i)
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(len(examples)):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def split_dataset(
    examples: Sequence[Example],
    ratios: tuple[float, float, float] = (0.6, 0.07, 0.33),
    seed: int = 0,
) -> tuple[list[Example], list[Example], list[Example]]:
    """Split into (train, validation, test) with no passage title shared across splits.

    Examples linked by a common title form one group. Groups are placed largest
    first (seeded shuffle among equal sizes) into whichever split is furthest
    below its target size.
    """
    if len(ratios) != 3 or any(r < 0 for r in ratios) or abs(sum(ratios) - 1.0) > 1e-9:
        raise InvalidRatios(f"ratios must be three non-negative numbers summing to 1, got {ratios}")
    groups = _title_groups(examples)
    rng = random.Random(seed)
    rng.shuffle(groups)
    groups.sort(key=len, reverse=True)

    total = len(examples)
    sizes = [0, 0, 0]
    assigned: list[list[int]] = [[], [], []]
    for group in groups:
        deficits = [ratios[s] * total - sizes[s] for s in range(3)]
        best = max(range(3), key=lambda s: (deficits[s], -s))
        assigned[best].extend(group)
        sizes[best] += len(group)
    train, val, test = ([examples[i] for i in sorted(idx)] for idx in assigned)
    return train, val, test


_ID_KEYS = ("id", "qid", "example_id")
_ANSWER_KEYS = ("answers", "summaries", "quoted_summaries")


def _published_passages(obj: dict) -> list[dict]:
    if isinstance(obj.get("passages"), list):
        out = []
        for p in obj["passages"]:
            if isinstance(p, str):
                out.append({"title": "", "text": p})
            else:
                out.append({"title": p.get("title", ""), "text": p.get("text", "")})
        return out
    out = []
    i = 1
    while f"source{i}" in obj or f"passage{i}" in obj:
        text = obj.get(f"source{i}", obj.get(f"passage{i}"))
        if text:
            out.append({"title": obj.get(f"title{i}", ""), "text": text})
        i += 1
    if not out and isinstance(obj.get("sources"), list):
        out = [{"title": "", "text": s} if isinstance(s, str) else dict(s) for s in obj["sources"]]
    return out


def _published_origin(obj: dict, ex_id: str) -> str:
    for key in ("origin", "dataset", "source_dataset"):
        value = obj.get(key)
        if isinstance(value, str):
            upper = value.upper()
            if "PAQ" in upper:
                return "PAQ"
            if "NQ" in upper or "AMBIG" in upper:
                return "NQ"
    lowered = ex_id.lower()
    if "paq" in lowered:
        return "PAQ"
    if "nq" in lowered or "ambig" in lowered:
        return "NQ"
    raise SchemaError(0, "origin", f"cannot infer origin for {ex_id!r}")


def convert_published(records: Iterable[dict]) -> list[dict]:
    """Convert records in the released repository layout to the canonical schema.

    Accepts numbered ``title{i}``/``source{i}`` keys or a ``passages`` list,
    ``summary`` or a list of answers, and either per-answer or per-passage
    ``short_answers``. Lines sharing an id (or question and titles) are merged
    so each canonical record holds all references for its question.
    """
    merged: dict[tuple, dict] = {}
    for n, obj in enumerate(records, 1):
        passages = _published_passages(obj)
        question = obj.get("question", "")
        ex_id = next((str(obj[k]) for k in _ID_KEYS if k in obj), None)
        key = (ex_id,) if ex_id is not None else (question, tuple(p["title"] for p in passages))
        if ex_id is None:
            ex_id = f"q{len(merged):05d}"
        answers = next((list(obj[k]) for k in _ANSWER_KEYS if isinstance(obj.get(k), list)), None)
        if answers is None:
            answers = [obj["summary"]] if isinstance(obj.get("summary"), str) else []

        short = obj.get("short_answers")
        k = len(passages)
        if isinstance(short, list) and short and all(isinstance(g, list) for g in short) \
                and len(short) == k and all(all(isinstance(s, str) for s in g) for g in short):
            short = [short for _ in answers]
        elif not (isinstance(short, list) and len(short) == len(answers)):
            short = [[[] for _ in range(k)] for _ in answers]

        rec = merged.get(key)
        if rec is None:
            merged[key] = {
                "id": ex_id,
                "question": question,
                "origin": _published_origin(obj, ex_id),
                "passages": passages,
                "answers": answers,
                "short_answers": short,
            }
        else:
            rec["answers"].extend(answers)
            rec["short_answers"].extend(short)
    return list(merged.values())
