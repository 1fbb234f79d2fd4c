import itertools
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from prosody_score.errors import AsrSchemaError, EmptyReferenceError, ValidationError
from prosody_score.transcript_align import (
    DELETE,
    INSERT,
    MATCH,
    SUBSTITUTE,
    accuracy_score,
    align_words,
    apply_ops,
    parse_asr_json,
    tokenize,
)

from synth import asr_doc, asr_json

ALPHABET = ("a", "b", "c")


def naive_levenshtein(a, b):
    """Plain exponential recursion on the heads of both sequences."""
    if not a:
        return len(b)
    if not b:
        return len(a)
    if a[0] == b[0]:
        return naive_levenshtein(a[1:], b[1:])
    return 1 + min(naive_levenshtein(a[1:], b), naive_levenshtein(a, b[1:]), naive_levenshtein(a[1:], b[1:]))


def all_sequences(max_len=4):
    for n in range(max_len + 1):
        yield from itertools.product(ALPHABET, repeat=n)


words = st.lists(st.sampled_from(["adam", "eve", "walk", "taxi"]), max_size=7)


# --- parse_asr_json -------------------------------------------------------


def test_parse_empty_words():
    asr = parse_asr_json(asr_json([]))
    assert asr.words == ()
    assert asr.source_id == "cand-1"


def test_parse_normalizes_and_sorts():
    asr = parse_asr_json(asr_json([("Walk.", 1.0, 1.5), ("Adam,", 0.0, 0.5)]))
    assert asr.tokens == ["adam", "walk"]


def test_parse_overlap_rejected():
    with pytest.raises(ValidationError):
        parse_asr_json(asr_json([("a", 0.0, 1.0), ("b", 0.9, 1.5)]))


@pytest.mark.parametrize(
    "words",
    [[("a", -0.1, 0.2)], [("a", 0.5, 0.5)], [("a", 0.6, 0.5)], [("!!", 0.0, 0.5)], [("a", 0.0, 0.5, 1.5)]],
)
def test_parse_invalid_words(words):
    with pytest.raises(ValidationError):
        parse_asr_json(asr_json(words))


@pytest.mark.parametrize("field", ["source_id", "utterance_confidence", "words"])
def test_parse_missing_top_level_field(field):
    doc = asr_doc([("a", 0, 1)])
    del doc[field]
    with pytest.raises(AsrSchemaError) as info:
        parse_asr_json(json.dumps(doc))
    assert info.value.field == field


@pytest.mark.parametrize("field", ["token", "start_s", "end_s", "confidence"])
def test_parse_missing_word_field(field):
    doc = asr_doc([("a", 0, 1)])
    del doc["words"][0][field]
    with pytest.raises(AsrSchemaError) as info:
        parse_asr_json(json.dumps(doc))
    assert info.value.field == f"words[0].{field}"
    assert field in str(info.value)


def test_parse_not_json():
    with pytest.raises(ValidationError):
        parse_asr_json("{nope")


def test_tokenize():
    assert tokenize("Adam wants to walk, but Eve prefers to take a taxi.") == [
        "adam", "wants", "to", "walk", "but", "eve", "prefers", "to", "take", "a", "taxi",
    ]


# --- align_words ------------------------------------------------------------


def test_identity():
    ref = ["adam", "wants", "to", "walk"]
    distance, ops = align_words(ref, ref)
    assert distance == 0
    assert [op.kind for op in ops] == [MATCH] * 4


def test_single_substitution():
    distance, ops = align_words(["adam", "wants", "to", "walk"], ["adam", "want", "to", "walk"])
    assert distance == naive_levenshtein(("adam", "wants", "to", "walk"), ("adam", "want", "to", "walk")) == 1
    subs = [op for op in ops if op.kind == SUBSTITUTE]
    assert len(subs) == 1
    assert subs[0].ref_index == 1 and subs[0].hyp_index == 1


def test_empty_hypothesis():
    distance, ops = align_words(["a", "b", "c"], [])
    assert distance == 3
    assert [op.kind for op in ops] == [DELETE] * 3
    assert [op.ref_index for op in ops] == [0, 1, 2]


def test_empty_both():
    assert align_words([], []) == (0, [])


def test_tie_break_prefers_delete_over_insert():
    # ref [a, b] vs hyp [b, a]: distance 2; the preferred script substitutes twice
    distance, ops = align_words(["a", "b"], ["b", "a"])
    assert distance == 2
    assert [op.kind for op in ops] == [SUBSTITUTE, SUBSTITUTE]
    _, ops = align_words(["a", "b"], ["b"])
    assert [op.kind for op in ops] == [DELETE, MATCH]


def test_exhaustive_against_naive_oracle():
    seqs = list(all_sequences(4))
    mismatches = 0
    for a in seqs:
        for b in seqs:
            distance, ops = align_words(a, b)
            if distance != naive_levenshtein(a, b):
                mismatches += 1
            assert sum(op.kind != MATCH for op in ops) == distance
            assert apply_ops(a, b, ops) == list(b)
    assert mismatches == 0


def test_symmetry_and_triangle_exhaustive():
    seqs = list(all_sequences(3))
    dist = {(a, b): align_words(a, b)[0] for a in seqs for b in seqs}
    for (a, b), d in dist.items():
        assert d == dist[(b, a)]
    for a in seqs:
        for b in seqs:
            for c in seqs:
                assert dist[(a, c)] <= dist[(a, b)] + dist[(b, c)]


@given(words, words)
def test_ops_structure(ref, hyp):
    _, ops = align_words(ref, hyp)
    for op in ops:
        if op.kind in (MATCH, SUBSTITUTE):
            assert op.ref_index is not None and op.hyp_index is not None
        elif op.kind == INSERT:
            assert op.ref_index is None and op.hyp_index is not None
        else:
            assert op.ref_index is not None and op.hyp_index is None
    ref_idx = [op.ref_index for op in ops if op.ref_index is not None]
    hyp_idx = [op.hyp_index for op in ops if op.hyp_index is not None]
    assert ref_idx == list(range(len(ref)))
    assert hyp_idx == list(range(len(hyp)))
    assert apply_ops(ref, hyp, ops) == hyp


# --- accuracy_score ---------------------------------------------------------


def test_accuracy_examples():
    assert accuracy_score(["a", "b"], ["a", "b"]) == 1.0
    assert accuracy_score(["a", "b", "c", "d"], ["a", "x", "c", "d"]) == 0.75
    assert accuracy_score(["a", "b", "c"], []) == 0.0


def test_accuracy_heavy_insertion_stays_in_range():
    assert 0.0 <= accuracy_score(["a"], ["x", "y", "z", "w"]) <= 1.0


def test_accuracy_empty_reference():
    with pytest.raises(EmptyReferenceError):
        accuracy_score([], ["a"])


@given(st.lists(st.sampled_from(["a", "b", "c"]), min_size=1, max_size=6), words)
def test_accuracy_one_iff_equal(ref, hyp):
    score = accuracy_score(ref, hyp)
    assert 0.0 <= score <= 1.0
    assert (score == 1.0) == (list(ref) == list(hyp))


@given(
    st.lists(st.sampled_from(["a", "b", "c"]), min_size=1, max_size=6),
    st.lists(st.sampled_from(["a", "b", "c"]), max_size=6),
    st.permutations(["x", "y", "z"]),
)
def test_accuracy_renaming_invariance(ref, hyp, perm):
    rename = dict(zip(["a", "b", "c"], perm))
    assert accuracy_score(ref, hyp) == accuracy_score([rename[t] for t in ref], [rename[t] for t in hyp])
