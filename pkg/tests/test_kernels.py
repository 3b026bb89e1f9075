import importlib
import os

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import lcs_by_enumeration, levenshtein_recursive
from semqa import _kernels_py, kernels

BACKENDS = [_kernels_py]
try:
    BACKENDS.append(importlib.import_module("semqa._kernels"))
except ImportError:  # extension not built
    pass


@pytest.fixture(params=BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def backend(request):
    return request.param


def test_active_backend_reported():
    assert kernels.BACKEND in ("cython", "python")
    if os.environ.get("SEMQA_PURE_PYTHON") == "1":
        assert kernels.BACKEND == "python"
    elif len(BACKENDS) == 2:
        assert kernels.BACKEND == "cython"


@pytest.mark.parametrize(
    "x, y, expected",
    [
        (list("abc"), list("abc"), 3),
        (list("abc"), list("de"), 0),
        (list("acbd"), list("abcd"), 3),
        ([], list("abc"), 0),
        (["the", "cat"], ["cat", "the", "cat"], 2),
    ],
)
def test_lcs_examples(backend, x, y, expected):
    assert backend.lcs_length(x, y) == expected


@pytest.mark.parametrize(
    "x, y, expected",
    [("Céline", "Celine", 1), ("same", "same", 0), ("abc", "", 3), ("", "", 0), ("kitten", "sitting", 3)],
)
def test_levenshtein_examples(backend, x, y, expected):
    assert backend.levenshtein(x, y) == expected


@given(st.lists(st.sampled_from("abcd"), max_size=8), st.lists(st.sampled_from("abcd"), max_size=8))
def test_lcs_matches_enumeration(x, y):
    expected = lcs_by_enumeration(x, y)
    for b in BACKENDS:
        assert b.lcs_length(x, y) == expected


@given(st.text(max_size=12), st.text(max_size=12))
def test_levenshtein_matches_recursion(x, y):
    expected = levenshtein_recursive(x, y)
    for b in BACKENDS:
        assert b.levenshtein(x, y) == expected


def test_astral_code_points(backend):
    assert backend.levenshtein("a😀b", "ab") == 1
    assert backend.lcs_length(["😀", 1, None], [1, None]) == 2
