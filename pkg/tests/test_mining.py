import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.feature_extraction.text import TfidfVectorizer

from oracles import dedup_by_subsets, iou_by_sets, levenshtein_recursive
from semqa.dataset import Passage
from semqa.mining import (
    MissingScore,
    QuotaTooLarge,
    TfidfIndex,
    Trigger,
    TripletRecord,
    balanced_sample,
    dedup_answers,
    filter_overlapping_passages,
    levenshtein,
    merge_questions,
    mine_questions,
    mined_to_json,
    passage_overlap,
    phi,
    word_iou,
)
from semqa.textnorm import normalize_tokens


def rec(answer, page, score, passage_text=None, question="q"):
    text = passage_text if passage_text is not None else f"passage about {page}"
    return TripletRecord(question, Passage(page, text), answer, page, score)


@pytest.mark.parametrize("x, y, d", [("Céline", "Celine", 1), ("same", "same", 0), ("abc", "", 3)])
def test_levenshtein(x, y, d):
    assert levenshtein(x, y) == d == levenshtein_recursive(x, y)


@pytest.mark.parametrize(
    "x, y, v",
    [
        ("b a c d", "a b c d", 1.0),
        ("a b", "c d", 0.0),
        ("x y z", "x y w", 0.5),
        # Normalization drops the article, leaving {b, c} against {b, d}.
        ("a b c", "a b d", 1 / 3),
        ("", "the", 1.0),
    ],
)
def test_word_iou(x, y, v):
    assert word_iou(x, y) == v


def test_phi_cases():
    assert phi("Céline Dion", "Celine Dion").triggered_by == {Trigger.LEVENSHTEIN, Trigger.IOU} - {Trigger.IOU}
    a, b = "q" * 40, "z" * 40
    assert not phi(a, b, 0.4)
    long_a = "the band toured extensively across northern europe during the late summer"
    long_b = "during late summer they played many concerts in scandinavian countries"
    v = phi(long_a, long_b, 0.9)
    assert v.similar and v.triggered_by == {Trigger.SEMANTIC}
    with pytest.raises(ValueError):
        phi("a", "b", 1.5)


words = st.lists(st.sampled_from("ab ba cab c dd".split()), max_size=6).map(" ".join)


@settings(max_examples=500)
@given(words, words, st.none() | st.floats(0, 1))
def test_phi_symmetry(x, y, s):
    assert phi(x, y, s) == phi(y, x, s)


@given(words, words)
def test_word_iou_oracle(x, y):
    assert word_iou(x, y) == iou_by_sets(normalize_tokens(x), normalize_tokens(y))


@given(st.text(max_size=8), st.text(max_size=8), st.text(max_size=8))
def test_levenshtein_triangle(x, y, z):
    assert levenshtein(x, z) <= levenshtein(x, y) + levenshtein(y, z)


def test_dedup_rules():
    assert dedup_answers([rec("one two three four five", "p", 0.9)])[0].page_id == "p"
    same_page = [rec("alpha beta gamma delta", "p", 0.9), rec("zeta eta theta iota kappa", "p", 0.8)]
    assert [c.short_answer for c in dedup_answers(same_page)] == ["alpha beta gamma delta"]
    sub = [
        rec("alpha beta gamma delta", "p1", 0.9, "Long text, with Zeta Eta Theta Iota inside."),
        rec("zeta eta theta iota", "p2", 0.8),
    ]
    assert len(dedup_answers(sub)) == 1
    short = [rec("too short", "p", 0.9)]
    assert dedup_answers(short) == [] and len(dedup_answers(short, min_words=2)) == 1
    assert dedup_answers([rec("one two three four", "p", 0.4)]) == []
    with pytest.raises(MissingScore):
        dedup_answers([rec("one two three four", "p", None)])


def test_dedup_uses_pair_scores_and_own_scores():
    a = rec("completely different words here now", "p1", 0.9)
    b = rec("nothing shared with that answer", "p2", 0.8)
    assert len(dedup_answers([a, b])) == 2
    assert len(dedup_answers([a, b], {(a.short_answer, b.short_answer): 0.7})) == 1
    b.semantic_sim[(a.short_answer, b.short_answer)] = 0.8
    assert len(dedup_answers([a, b])) == 1


ANSWERS = ["red green blue yellow", "red green blue yellow!", "green red blue yellow",
           "one two three four five six", "cats and dogs forever", "too short", "x y z w v"]
candidate = st.builds(
    rec,
    st.sampled_from(ANSWERS),
    st.sampled_from(["p1", "p2", "p3", "p4"]),
    st.floats(0, 1),
    st.sampled_from(["nothing here", "we saw RED GREEN BLUE YELLOW today", "one two three four five six seven"]),
)


def _conflicts(c, k):
    return (
        c.page_id == k.page_id
        or c.short_answer.lower() in k.passage.text.lower()
        or phi(c.short_answer, k.short_answer).similar
    )


@given(st.lists(candidate, max_size=5))
def test_dedup_matches_subset_oracle(cands):
    assert dedup_answers(cands) == dedup_by_subsets(cands, _conflicts, 0.5, 4)


@settings(max_examples=500)
@given(st.lists(candidate, max_size=6, unique_by=lambda c: c.qa_score), st.randoms())
def test_dedup_permutation_invariant(cands, rnd):
    shuffled = list(cands)
    rnd.shuffle(shuffled)
    assert dedup_answers(shuffled) == dedup_answers(cands)


def _sklearn_cosine(docs, i, j):
    vec = TfidfVectorizer(tokenizer=normalize_tokens, lowercase=False, token_pattern=None)
    m = vec.fit_transform(docs)
    return float((m[i] @ m[j].T).toarray()[0, 0])


def test_merge_questions():
    assert merge_questions(["who is he", "who is he"]) == [[0, 1]]
    idx = TfidfIndex(["who is he", "who is he"])
    assert math.isclose(idx.cosine(idx.vectors[0], idx.vectors[1]), 1.0)
    assert merge_questions(["alpha beta", "gamma delta"]) == [[0], [1]]
    dylan = ["where did bob dylan tour in 1978", "where did bob dylan tour in 1979"]
    idx = TfidfIndex(dylan)
    cos = idx.cosine(idx.vectors[0], idx.vectors[1])
    assert math.isclose(cos, _sklearn_cosine(dylan, 0, 1), abs_tol=1e-12)
    assert math.isclose(cos, 0.75232, abs_tol=1e-5)
    assert merge_questions(dylan) == [[0], [1]]
    assert merge_questions(dylan, threshold=0.7) == [[0, 1]]
    with pytest.raises(ValueError):
        merge_questions([])


@given(st.lists(words, min_size=2, max_size=6))
def test_tfidf_matches_sklearn(docs):
    idx = TfidfIndex(docs)
    if not any(idx.vectors):
        return
    vec = TfidfVectorizer(tokenizer=normalize_tokens, lowercase=False, token_pattern=None)
    m = vec.fit_transform(docs)
    got = [[idx.cosine(a, b) for b in idx.vectors] for a in idx.vectors]
    want = (m @ m.T).toarray()
    for i in range(len(docs)):
        for j in range(len(docs)):
            assert math.isclose(got[i][j], want[i, j], abs_tol=1e-9)


def test_merge_transitive_chain():
    qs = ["a1 a2 a3 a4 a5 a6", "a1 a2 a3 a4 a5 a6 b1", "a1 a2 a3 a4 a5 a6 b1 b2 b3"]
    idx = TfidfIndex(qs)
    v = idx.vectors
    assert idx.cosine(v[0], v[2]) < 0.7 < min(idx.cosine(v[0], v[1]), idx.cosine(v[1], v[2]))
    assert merge_questions(qs, threshold=0.7) == [[0, 1, 2]]
    assert merge_questions(qs, threshold=0.8) == [[0, 1], [2]]


def test_passage_overlap():
    p = Passage("t", "one two three")
    assert passage_overlap(p, p) == 1.0
    assert passage_overlap(p, Passage("u", "four five")) == 0.0
    six = Passage("a", "a1 a2 a3 x y z")
    assert passage_overlap(six, Passage("b", "x y z b1 b2 b3 b4 b5")) == 0.5
    recs = [rec("w", "1", 0.9, six.text), rec("w", "2", 0.9, "x y z b1 b2 b3"), rec("w", "3", 0.9, "q r s")]
    assert [r.page_id for r in filter_overlapping_passages(recs)] == ["1", "3"]
    assert len(filter_overlapping_passages(recs, max_overlap=0.5)) == 3


def test_balanced_sample():
    items = [("who", 2, i) for i in range(10)] + [("what", 3, i) for i in range(10)]
    out = balanced_sample(items, 10, seed=3)
    assert sum(1 for t, _, _ in out if t == "who") == 5
    skew = [("why", 2, 0)] + [("how", 2, i) for i in range(100)]
    out = balanced_sample(skew, 4, seed=0)
    assert sum(1 for t, _, _ in out if t == "why") == 1 and len(out) == 4
    assert balanced_sample(items, 7, seed=9) == balanced_sample(items, 7, seed=9)
    with pytest.raises(QuotaTooLarge):
        balanced_sample(items, 21)


def test_triplet_score_validated():
    with pytest.raises(ValueError):
        rec("a", "p", 1.2)


def test_mine_questions_pipeline():
    records = [
        rec("the first long answer text", "p1", 0.9, "alpha passage", question="who sang the song"),
        rec("a second different answer here", "p2", 0.8, "beta passage", question="who sang the song"),
        rec("a third candidate answer value", "p3", 0.95, "gamma passage", question="who sang the song?"),
        rec("lonely answer with four words", "p4", 0.9, "delta passage", question="what is unrelated"),
    ]
    mined = mine_questions(records)
    assert len(mined) == 1
    (m,) = mined
    assert m.question == "who sang the song?"  # higher mean kept score
    assert m.merged_from == ["who sang the song"]
    assert [a.page_id for a in m.answers] == ["p3", "p1", "p2"]
    out = mined_to_json(m, "m1")
    assert "answers" not in out and out["question_type"] == "who"
    assert out["short_answers"] == [[["a third candidate answer value"], ["the first long answer text"],
                                      ["a second different answer here"]]]
    assert mine_questions([]) == []
