from __future__ import annotations

import json
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"


def make_record(i: int, k: int = 3, refs: int = 2) -> dict:
    """A synthetic but well-formed dataset record with ``k`` passages."""
    passages = []
    for s in range(1, k + 1):
        passages.append({
            "title": f"Topic {i}-{s}",
            "text": (
                f"Item {i} version {s} was released in {1900 + 10 * s + i}. "
                f"It was produced by studio number {s} in city {i}. "
                f"Critics praised the {s} edition widely. "
                f"Sales reached {s * 1000 + i} copies. "
                f"A sequel followed later."
            ),
        })
    answers, short = [], []
    for r in range(refs):
        parts = [f"Item {i} has {k} versions:"]
        per_source = []
        for s in range(1, k + 1):
            if r == 1 and s == k:
                per_source.append([])
                continue
            year = str(1900 + 10 * s + i)
            parts.append(f"one [ {s} was released in {year} ] and")
            per_source.append([year])
        parts.append("more.")
        answers.append(" ".join(parts))
        short.append(per_source)
    return {
        "id": f"ex{i:03d}",
        "question": f"When was item {i} released?",
        "origin": "PAQ" if i % 3 else "NQ",
        "passages": passages,
        "answers": answers,
        "short_answers": short,
    }


@pytest.fixture
def synthetic_dataset(tmp_path: Path) -> Path:
    path = tmp_path / "dataset.jsonl"
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(12):
            fh.write(json.dumps(make_record(i, k=2 + i % 3)) + "\n")
    return path


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS, key=lambda l: int(l.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
