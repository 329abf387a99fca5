"""Text-based intelligibility metrics against naive oracles."""
import random

import pytest
from hypothesis import given, settings, strategies as st

from dysintel.strops import SPACE, UNK, from_word, parse_seq
from dysintel.text_metrics import (
    GroundTruth,
    NormalizedHypothesis,
    UtteranceScore,
    aggregate_speaker,
    edit_distance,
    matching_chars,
    normalize_hypothesis,
    score_ld,
    score_sm,
    score_unk,
)

from oracles import lev_naive, ro_match_naive

# a small alphabet keeps the exponential oracle affordable
small_tokens = st.sampled_from(["a", "b", "c", UNK, SPACE])
small_seqs = st.lists(small_tokens, max_size=8).map(tuple)
letter_seqs = st.lists(st.sampled_from("abc"), max_size=8).map(tuple)


def test_normalize_hypothesis_squeezes_then_strips():
    h = normalize_hypothesis(
        parse_seq("n a a _ t t t <unk> u u u _ r r r r <unk> e e <unk>")
    )
    assert h.s1 == parse_seq("n a t u r e")
    assert h.l1 == 6
    assert h.unk_count == 3


def test_normalize_hypothesis_counts_unk_after_squeeze():
    # three raw unk tokens squeeze into a single run
    h = normalize_hypothesis((UNK, UNK, UNK))
    assert h.s1 == ()
    assert h.l1 == 0
    assert h.unk_count == 1


def test_normalized_hypothesis_rejects_leftover_specials():
    with pytest.raises(ValueError):
        NormalizedHypothesis(s1=(UNK,), unk_count=0)
    with pytest.raises(ValueError):
        NormalizedHypothesis(s1=(SPACE,), unk_count=0)


def test_ground_truth_validation():
    truth = GroundTruth(from_word("nature"))
    assert truth.l_g == 6
    with pytest.raises(ValueError):
        GroundTruth(())
    with pytest.raises(ValueError):
        GroundTruth((UNK,))


def test_utterance_score_range_checked():
    with pytest.raises(ValueError):
        UtteranceScore(metric="sm", value=101.0)
    with pytest.raises(ValueError):
        UtteranceScore(metric="bogus", value=50.0)


def test_matching_chars_partial():
    assert matching_chars(from_word("natre"), from_word("nature")) == 5
    assert matching_chars((), from_word("nature")) == 0
    assert matching_chars(from_word("abc"), from_word("abc")) == 3


def test_score_sm_partial():
    h = NormalizedHypothesis(s1=from_word("natre"), unk_count=0)
    g = GroundTruth(from_word("nature"))
    assert score_sm(h, g).value == pytest.approx(1000 / 11)


def test_edit_distance_pinned():
    assert edit_distance(from_word("natre"), from_word("nature")) == 1
    assert edit_distance((), from_word("ab")) == 2
    assert edit_distance(from_word("kitten"), from_word("sitting")) == 3


def test_score_ld_partial():
    h = NormalizedHypothesis(s1=from_word("natre"), unk_count=0)
    g = GroundTruth(from_word("nature"))
    assert score_ld(h, g).value == pytest.approx((1 - 1 / 11) * 100)


def test_score_unk_half():
    h = NormalizedHypothesis(s1=from_word("nature"), unk_count=3)
    g = GroundTruth(from_word("nature"))
    assert score_unk(h, g).value == pytest.approx(50.0)


def test_score_unk_clamps_at_zero():
    h = NormalizedHypothesis(s1=(), unk_count=9)
    g = GroundTruth(from_word("ab"))
    assert score_unk(h, g).value == 0.0


def test_perfect_hypothesis_scores_100():
    h = normalize_hypothesis(parse_seq("n n a t t t u r e e"))
    g = GroundTruth(from_word("nature"))
    assert score_sm(h, g).value == 100.0
    assert score_ld(h, g).value == 100.0
    assert score_unk(h, g).value == 100.0


@settings(max_examples=300)
@given(small_seqs, small_seqs)
def test_edit_distance_matches_naive_recursion(a, b):
    assert edit_distance(a, b) == lev_naive(a, b)


@given(small_seqs, small_seqs)
def test_edit_distance_symmetric(a, b):
    assert edit_distance(a, b) == edit_distance(b, a)


@given(small_seqs, small_seqs, small_seqs)
def test_edit_distance_triangle_inequality(a, b, c):
    assert edit_distance(a, c) <= edit_distance(a, b) + edit_distance(b, c)


@settings(max_examples=300)
@given(letter_seqs, letter_seqs)
def test_matching_chars_matches_naive_recursion(a, b):
    assert matching_chars(a, b) == ro_match_naive(a, b)


@given(st.lists(small_tokens, max_size=20).map(tuple), st.sampled_from(["nature", "ab", "he's"]))
def test_scores_stay_in_range(stream, word):
    h = normalize_hypothesis(stream)
    g = GroundTruth(from_word(word))
    for score in (score_sm(h, g), score_ld(h, g), score_unk(h, g)):
        assert 0.0 <= score.value <= 100.0


def test_aggregate_speaker_means_words_then_speaker():
    assert aggregate_speaker({"a": [90.0, 70.0], "b": [60.0]}) == pytest.approx(70.0)
    assert aggregate_speaker({"only": [42.0]}) == pytest.approx(42.0)


def test_aggregate_speaker_rejects_empty():
    with pytest.raises(ValueError):
        aggregate_speaker({})
    with pytest.raises(ValueError):
        aggregate_speaker({"a": []})


def test_aggregate_speaker_word_order_invariant():
    rng = random.Random(0)
    scores = {f"w{i}": [rng.uniform(0, 100) for _ in range(3)] for i in range(6)}
    shuffled_keys = list(scores)
    rng.shuffle(shuffled_keys)
    shuffled = {k: scores[k] for k in shuffled_keys}
    assert aggregate_speaker(scores) == aggregate_speaker(shuffled)
