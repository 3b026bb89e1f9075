"""Command-line interface.

Exit codes: 0 success, 1 I/O, schema or module error, 2 hypothesis/dataset
id mismatch in ``score``. Every randomized command takes ``--seed``; the
default comes from ``SEMQA_SEED`` (else 0).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections.abc import Sequence
from pathlib import Path

from . import dataset as ds
from .baselines import Mode, lead_tail_baseline
from .markup import MarkupError, ParseMode, parse, serialize, strip_marks
from .metrics import aggregate, score_answer
from .mining import (
    PASSAGE_OVERLAP_MAX,
    TripletRecord,
    balanced_sample,
    filter_overlapping_passages,
    mine_questions,
    mined_to_json,
)
from .prompting import Format, Method, build_prompt, random_scores, retrieve_exemplars
from .transform import render, render_document, to_sentence_citations


class CommandError(Exception):
    def __init__(self, message: str, code: int = 1):
        self.code = code
        super().__init__(message)


def _default_seed() -> int:
    try:
        return int(os.environ.get("SEMQA_SEED", "0"))
    except ValueError:
        return 0


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _read_jsonl(path: str) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            if line.strip():
                try:
                    rows.append(json.loads(line))
                except json.JSONDecodeError as exc:
                    raise CommandError(f"{path}:{n}: invalid JSON: {exc}") from exc
    return rows


def _jsonl(rows) -> str:
    return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows)


def _read_hypotheses(path: str) -> dict[str, str]:
    hyps: dict[str, str] = {}
    for n, row in enumerate(_read_jsonl(path), 1):
        if not isinstance(row, dict) or not isinstance(row.get("id"), str) or not isinstance(row.get("answer"), str):
            raise CommandError(f"{path}: record {n} needs string 'id' and 'answer'")
        if row["id"] in hyps:
            raise CommandError(f"{path}: duplicate hypothesis id {row['id']!r}")
        hyps[row["id"]] = row["answer"]
    return hyps


def cmd_score(args: argparse.Namespace) -> int:
    examples = ds.load_dataset(args.dataset)
    hyps = _read_hypotheses(args.hypotheses)
    by_id = {ex.id: ex for ex in examples}
    missing = sorted(set(by_id) - set(hyps))
    unknown = sorted(set(hyps) - set(by_id))
    if missing or unknown:
        for i in missing:
            print(f"no hypothesis for dataset id {i}", file=sys.stderr)
        for i in unknown:
            print(f"hypothesis id {i} not in dataset", file=sys.stderr)
        return 2
    mode = ParseMode.STRICT if args.strict else ParseMode.LENIENT
    rows = []
    for ex_id in sorted(by_id):
        ex = by_id[ex_id]
        try:
            hyp = parse(hyps[ex_id], mode, source_count=ex.k)
        except MarkupError as exc:
            raise CommandError(f"hypothesis {ex_id}: {exc}") from exc
        if not ex.answers:
            raise CommandError(f"dataset example {ex_id} has no reference answers")
        rows.append(score_answer(ex_id, hyp, ex.answers, ex.short_answers, ex.k, args.granularity))
    report = aggregate(rows, bootstrap=args.bootstrap, seed=args.seed, confidence=args.confidence)
    report.meta = {"examples": len(rows), "parse_mode": mode.value, "sem_rec_granularity": args.granularity,
                   "bootstrap": args.bootstrap, "seed": args.seed}
    _emit(report.to_csv() if args.format == "csv" else report.to_json(), args.out)
    return 0


def cmd_baseline(args: argparse.Namespace) -> int:
    examples = ds.load_dataset(args.dataset)
    rows = [
        {"id": ex.id, "answer": serialize(lead_tail_baseline(ex, Mode(args.mode), args.k))}
        for ex in examples
    ]
    _emit(_jsonl(rows), args.out)
    return 0


def _load_answers(path: str, source: str) -> list[tuple[str, object]]:
    """(id, raw) pairs; raw is a markup string, or an Example for datasets."""
    if source == "markup":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        return [(str(i), line) for i, line in enumerate(lines, 1) if line.strip()]
    if source == "hypotheses":
        return list(_read_hypotheses(path).items())
    if source == "dataset":
        return [(ex.id, ex) for ex in ds.load_dataset(path)]
    raise CommandError(f"unknown input kind {source!r}")


def _answers_of(item, mode: ParseMode):
    """Parsed answers for one loaded input item."""
    if isinstance(item, ds.Example):
        return list(item.answers)
    try:
        return [parse(item, mode)]
    except MarkupError as exc:
        raise CommandError(str(exc)) from exc


def cmd_convert(args: argparse.Namespace) -> int:
    if args.source == "published":
        if args.to != "dataset":
            raise CommandError("--from published only converts --to dataset")
        records = ds.convert_published(_read_jsonl(args.input))
        for n, rec in enumerate(records, 1):
            ds.example_from_json(rec, n)
        _emit(_jsonl(records), args.out)
        return 0
    if args.to == "dataset":
        raise CommandError("--to dataset needs --from published")

    convert = {"qsum-s": to_sentence_citations, "plain": strip_marks, "canonical": serialize}[args.to]
    mode = ParseMode.STRICT if args.strict else ParseMode.LENIENT
    items = _load_answers(args.input, args.source)
    if args.source == "markup":
        text = "".join(convert(a) + "\n" for _, raw in items for a in _answers_of(raw, mode))
    else:
        rows = []
        for ex_id, raw in items:
            for n, a in enumerate(_answers_of(raw, mode)):
                rows.append({"id": ex_id if args.source == "hypotheses" else f"{ex_id}#{n}", "answer": convert(a)})
        text = _jsonl(rows)
    _emit(text, args.out)
    return 0


def cmd_render(args: argparse.Namespace) -> int:
    mode = ParseMode.STRICT if args.strict else ParseMode.LENIENT
    items = []
    for ex_id, raw in _load_answers(args.input, args.source):
        answers = _answers_of(raw, mode)
        items.extend((ex_id if len(answers) == 1 else f"{ex_id} #{n}", a) for n, a in enumerate(answers))
    if args.target == "html":
        _emit(render_document(items), args.out)
    else:
        _emit("".join(f"{name}\t{render(a, 'ansi')}\n" for name, a in items), args.out)
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    stats = ds.compute_stats(ds.load_dataset(args.dataset))
    _emit(stats.to_table() if args.format == "table" else stats.to_json(), args.out)
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    report = ds.validate_dataset(args.dataset)
    _emit(report.to_json(), args.out)
    return 0 if report.ok else 1


def cmd_split(args: argparse.Namespace) -> int:
    examples = ds.load_dataset(args.dataset)
    parts = ds.split_dataset(examples, tuple(args.ratios), seed=args.seed)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, part in zip(("train", "validation", "test"), parts):
        ds.dump_dataset(part, out_dir / f"{name}.jsonl")
    return 0


def _triplets(path: str) -> list[TripletRecord]:
    out = []
    for n, row in enumerate(_read_jsonl(path), 1):
        try:
            passage = ds.Passage(row["passage"]["title"], row["passage"]["text"])
            out.append(TripletRecord(row["question"], passage, row["short_answer"], str(row["page_id"]),
                                     row.get("qa_score")))
        except (KeyError, TypeError, ValueError) as exc:
            raise CommandError(f"{path}: triplet {n} malformed: {exc}") from exc
    return out


def cmd_mine(args: argparse.Namespace) -> int:
    records = _triplets(args.triplets)
    pair_scores = None
    if args.pair_scores:
        pair_scores = {(r["x"], r["y"]): float(r["score"]) for r in _read_jsonl(args.pair_scores)}
    mined = mine_questions(records, pair_scores, merge_threshold=args.threshold, min_words=args.min_words)
    if args.passage_overlap is not None:
        for m in mined:
            m.answers = filter_overlapping_passages(m.answers, args.passage_overlap)
        mined = [m for m in mined if len(m.answers) >= 2]
    if args.quota is not None:
        items = [(ds.question_type(m.question), len(m.answers), i) for i, m in enumerate(mined)]
        picked = sorted(i for _, _, i in balanced_sample(items, args.quota, args.seed))
        mined = [mined[i] for i in picked]
    rows = [mined_to_json(m, f"{args.origin.lower()}-{i:06d}", args.origin) for i, m in enumerate(mined)]
    _emit(_jsonl(rows), args.out)
    return 0


def cmd_prompt(args: argparse.Namespace) -> int:
    train = ds.load_dataset(args.train)
    queries = ds.load_dataset(args.queries)
    if args.id:
        wanted = set(args.id)
        queries = [q for q in queries if q.id in wanted]
        if not queries:
            raise CommandError("none of the requested --id values are in the query file")
    scores = None
    if args.method == "random":
        method, scores = Method.PRECOMPUTED, random_scores(train, args.seed)
    elif args.method == "precomputed":
        if not args.scores:
            raise CommandError("--method precomputed needs --scores")
        method = Method.PRECOMPUTED
        table = json.loads(Path(args.scores).read_text(encoding="utf-8"))
    else:
        method = Method.TFIDF
    rows = []
    for q in queries:
        if args.method == "precomputed":
            scores = table.get(q.id)
        pool = [ex for ex in train if ex.id != q.id]
        exemplars = retrieve_exemplars(q.question, pool, args.n, method, scores)
        rows.append({"id": q.id, "prompt": build_prompt(exemplars, q, Format(args.format), seed=args.seed)})
    if len(rows) == 1 and args.id:
        _emit(rows[0]["prompt"], args.out)
    else:
        _emit(_jsonl(rows), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="semqa", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    seed_kw = dict(type=int, default=_default_seed(), help="random seed (default: $SEMQA_SEED or 0)")

    def add_parse_mode(p: argparse.ArgumentParser, strict_default: bool) -> None:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--strict", dest="strict", action="store_true", help="reject malformed markup")
        g.add_argument("--lenient", dest="strict", action="store_false", help="demote malformed markup to text")
        p.set_defaults(strict=strict_default)

    p = sub.add_parser("score", help="score hypotheses against a dataset")
    p.add_argument("--hypotheses", required=True, help='JSONL of {"id", "answer"}')
    p.add_argument("--dataset", required=True)
    p.add_argument("--bootstrap", type=int, default=0, metavar="B", help="bootstrap resamples for CIs")
    p.add_argument("--confidence", type=float, default=0.95)
    p.add_argument("--seed", **seed_kw)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--granularity", choices=["bundle", "answer"], default="bundle",
                   help="Sem-Rec short-answer grouping")
    p.add_argument("--out")
    add_parse_mode(p, strict_default=False)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("baseline", help="Lead-k / Tail-k hypotheses")
    p.add_argument("--dataset", required=True)
    p.add_argument("--mode", choices=["lead", "tail"], required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("convert", help="convert answers between formats")
    p.add_argument("--input", required=True)
    p.add_argument("--from", dest="source", choices=["markup", "hypotheses", "dataset", "published"],
                   default="markup", help="markup = one answer per line")
    p.add_argument("--to", choices=["qsum-s", "plain", "canonical", "dataset"], required=True)
    p.add_argument("--out")
    add_parse_mode(p, strict_default=True)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("render", help="highlight quotes as HTML or ANSI")
    p.add_argument("--input", required=True)
    p.add_argument("--from", dest="source", choices=["markup", "hypotheses", "dataset"], default="markup")
    p.add_argument("--target", choices=["html", "ansi"], default="html")
    p.add_argument("--out")
    add_parse_mode(p, strict_default=False)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("stats", help="dataset statistics")
    p.add_argument("--dataset", required=True)
    p.add_argument("--format", choices=["json", "table"], default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("validate", help="validation report for a dataset file")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("split", help="title-disjoint train/validation/test split")
    p.add_argument("--dataset", required=True)
    p.add_argument("--ratios", type=float, nargs=3, default=[0.6, 0.07, 0.33])
    p.add_argument("--seed", **seed_kw)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("mine", help="filter (question, passage, answer) triplets into questions")
    p.add_argument("--triplets", required=True)
    p.add_argument("--pair-scores", help='JSONL of {"x", "y", "score"} semantic similarities')
    p.add_argument("--threshold", type=float, default=0.9, help="question-merge cosine threshold")
    p.add_argument("--min-words", type=int, default=4)
    p.add_argument("--passage-overlap", type=float, nargs="?", const=PASSAGE_OVERLAP_MAX, default=None,
                   help="drop passages overlapping a kept one above this ratio")
    p.add_argument("--quota", type=int, help="balanced sample size")
    p.add_argument("--origin", choices=list(ds.ORIGINS), default="PAQ")
    p.add_argument("--seed", **seed_kw)
    p.add_argument("--out")
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("prompt", help="few-shot prompts with retrieved exemplars")
    p.add_argument("--train", required=True)
    p.add_argument("--queries", required=True, help="dataset JSONL of query examples")
    p.add_argument("--id", action="append", help="restrict to these query ids")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--format", choices=[f.value for f in Format], default="qsum")
    p.add_argument("--method", choices=["tfidf", "precomputed", "random"], default="tfidf")
    p.add_argument("--scores", help="JSON {query_id: {train_id: score}} for --method precomputed")
    p.add_argument("--seed", **seed_kw)
    p.add_argument("--out")
    p.set_defaults(func=cmd_prompt)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CommandError as exc:
        print(f"semqa {args.command}: {exc}", file=sys.stderr)
        return exc.code
    except (OSError, ds.DatasetError, ValueError) as exc:
        print(f"semqa {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
