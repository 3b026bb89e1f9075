import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_record
from oracles import greedy_split_sizes
from semqa.dataset import (
    Example,
    InvalidRatios,
    JsonError,
    MarkupError,
    Passage,
    SchemaError,
    ValidationReport,
    compute_stats,
    convert_published,
    dump_dataset,
    example_from_json,
    load_dataset,
    question_type,
    split_dataset,
    validate_dataset,
)


def write_lines(path, rows):
    path.write_text("".join((r if isinstance(r, str) else json.dumps(r)) + "\n" for r in rows))
    return path


def test_load_two_lines(tmp_path):
    path = write_lines(tmp_path / "d.jsonl", [make_record(1), make_record(2)])
    examples = load_dataset(path)
    assert [e.id for e in examples] == ["ex001", "ex002"]
    assert examples[0].k == 3 and len(examples[0].answers) == 2


def test_index_out_of_range_is_markup_error(tmp_path):
    rec = make_record(1, k=3)
    rec["answers"][0] = "cites [ 5 a missing source ]"
    with pytest.raises(MarkupError) as info:
        load_dataset(write_lines(tmp_path / "d.jsonl", [rec]))
    assert info.value.kind == "IndexOutOfRange" and info.value.line == 1


def test_json_and_schema_errors(tmp_path):
    with pytest.raises(JsonError) as info:
        load_dataset(write_lines(tmp_path / "a.jsonl", [make_record(1), "{not json"]))
    assert info.value.line == 2
    rec = make_record(1)
    rec["origin"] = "TriviaQA"
    with pytest.raises(SchemaError) as info:
        load_dataset(write_lines(tmp_path / "b.jsonl", [rec]))
    assert info.value.field == "origin"
    rec = make_record(1)
    rec["passages"] = rec["passages"][:1]
    rec["short_answers"] = [r[:1] for r in rec["short_answers"]]
    with pytest.raises(SchemaError):
        example_from_json(rec)


def test_validation_report_collects_everything(tmp_path):
    long = make_record(3)
    long["answers"][0] += " word" * 120
    bad = make_record(4)
    bad["answers"][1] = "[ 1 unclosed"
    path = write_lines(tmp_path / "d.jsonl", [make_record(1), long, bad, "oops"])
    report = validate_dataset(path)
    assert report.examples == 2
    assert [e["type"] for e in report.errors] == ["UnmatchedOpenBracket", "JsonError"]
    assert len(report.warnings) == 1 and report.warnings[0]["line"] == 2
    assert json.loads(report.to_json())["ok"] is False


def test_load_dump_fixed_point(tmp_path):
    src = write_lines(tmp_path / "a.jsonl", [make_record(i, k=2 + i % 4) for i in range(6)])
    first = load_dataset(src)
    dump_dataset(first, tmp_path / "b.jsonl")
    second = load_dataset(tmp_path / "b.jsonl")
    assert first == second
    dump_dataset(second, tmp_path / "c.jsonl")
    assert (tmp_path / "b.jsonl").read_bytes() == (tmp_path / "c.jsonl").read_bytes()


def test_load_reports_long_answers(tmp_path):
    rec = make_record(1)
    rec["answers"][1] += " filler" * 101
    report = ValidationReport("x")
    load_dataset(write_lines(tmp_path / "d.jsonl", [rec]), report)
    assert report.examples == 1 and len(report.warnings) == 1


@pytest.mark.parametrize(
    "question, expected",
    [
        ("Who is the actress that portrays wonder woman?", "who"),
        ("what does nasa stand for", "stand_for"),
        ("What does NASA Stand For?", "stand_for"),
        ("In which cities in india are there commissionerates?", "other"),
        ("Why was the porsche 911 rs built?", "why"),
        ("when did rocky horror picture show come out?  ", "when"),
        ("", "other"),
    ],
)
def test_question_type(question, expected):
    assert question_type(question) == expected


@given(st.text(), st.text(alphabet=" \t\n"))
def test_question_type_total_and_whitespace_stable(q, pad):
    assert question_type(q + pad) == question_type(q)


def test_stats():
    empty = compute_stats([])
    assert empty.example_count == empty.answer_count == empty.max_passages == 0
    assert sum(empty.question_types.values()) == 0
    exs = [example_from_json(make_record(i, k=2 + i % 3)) for i in range(7)]
    s = compute_stats(exs)
    assert s.example_count == 7 and s.answer_count == 14 and s.unique_question_count == 7
    assert s.by_origin == {"PAQ": 4, "NQ": 3}
    assert s.max_passages == 4
    assert sum(s.sources_per_question.values()) == sum(s.question_types.values()) == 7
    assert s.sources_per_question == {2: 3, 3: 2, 4: 2}
    assert "unique questions" in s.to_table()


def _example(i, titles):
    return Example(f"e{i}", f"q{i}", "PAQ", tuple(Passage(t, "text.") for t in titles))


def test_split_single_group():
    exs = [_example(i, ["shared", f"t{i}"]) for i in range(5)]
    parts = split_dataset(exs, (0.6, 0.07, 0.33), seed=1)
    assert sorted(len(p) for p in parts) == [0, 0, 5]


def test_split_sizes_match_greedy_simulation():
    exs = [_example(i, [f"a{i}", f"b{i}"]) for i in range(100)]
    train, val, test = split_dataset(exs, (0.6, 0.07, 0.33), seed=0)
    expected = greedy_split_sizes([1] * 100, (0.6, 0.07, 0.33))
    assert [len(train), len(val), len(test)] == expected
    for got, target in zip(expected, (60, 7, 33)):
        assert abs(got - target) <= 2


def test_split_deterministic_and_validated():
    exs = [_example(i, [f"t{i % 17}", f"u{i % 5}"]) for i in range(40)]
    assert split_dataset(exs, seed=4) == split_dataset(exs, seed=4)
    with pytest.raises(InvalidRatios):
        split_dataset(exs, (0.5, 0.5, 0.5))


@settings(max_examples=500)
@given(
    st.lists(st.lists(st.integers(0, 30), min_size=1, max_size=3), max_size=40),
    st.integers(0, 2**16),
)
def test_split_title_disjointness(title_ids, seed):
    exs = [_example(i, [f"t{t}" for t in ts]) for i, ts in enumerate(title_ids)]
    train, val, test = split_dataset(exs, (0.6, 0.07, 0.33), seed=seed)
    assert len(train) + len(val) + len(test) == len(exs)
    titles = [{p.title for e in part for p in e.passages} for part in (train, val, test)]
    assert not titles[2] & (titles[0] | titles[1])
    assert not titles[0] & titles[1]


def test_convert_published_numbered_keys():
    rows = [
        {"qid": "paq-1", "question": "who?", "title1": "A", "source1": "Alpha text.", "title2": "B",
         "source2": "Beta text.", "summary": "[ 1 Alpha ] and [ 2 Beta ]"},
        {"qid": "paq-1", "question": "who?", "title1": "A", "source1": "Alpha text.", "title2": "B",
         "source2": "Beta text.", "summary": "[ 2 Beta text ]"},
        {"qid": "nq-9", "question": "when?", "passages": [{"title": "C", "text": "c."}, {"title": "D", "text": "d."}],
         "answers": ["[ 1 c ]"], "short_answers": [["c"], []]},
    ]
    out = convert_published(rows)
    assert [r["id"] for r in out] == ["paq-1", "nq-9"]
    assert out[0]["origin"] == "PAQ" and out[1]["origin"] == "NQ"
    assert out[0]["answers"] == ["[ 1 Alpha ] and [ 2 Beta ]", "[ 2 Beta text ]"]
    assert out[0]["short_answers"] == [[[], []], [[], []]]
    assert out[1]["short_answers"] == [[["c"], []]]
    for rec in out:
        example_from_json(rec)
