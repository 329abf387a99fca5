"""Subset cost, Pearson correlation and the exhaustive search."""
import random

import pytest

from dysintel.selection import (
    Alphas,
    PoolTooLargeError,
    UndefinedCorrelationError,
    optimize,
    pearson,
    scenario,
    subset_cost,
    subset_speaker_score,
)

from oracles import above_mean_words, subset_oracle


def random_problem(rng, n_words, n_speakers=4):
    efforts = {f"w{i:02d}": rng.randint(1, 50) for i in range(n_words)}
    speakers = [f"s{j}" for j in range(n_speakers)]
    perceptual = {s: rng.uniform(5.0, 95.0) for s in speakers}
    metric_scores = {
        s: {w: rng.uniform(0.0, 100.0) for w in efforts} for s in speakers
    }
    return efforts, metric_scores, perceptual


def test_alphas_validation():
    Alphas(1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        Alphas(-1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        Alphas(0.0, 0.0, 0.0)


def test_scenario_presets():
    assert scenario("dictionary-only") == Alphas(1.0, 0.0, 1.0)
    assert scenario("correlation-only") == Alphas(1.0, 1.0, 0.0)
    assert scenario("full") == Alphas(1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        scenario("bogus")


def test_pearson_pinned():
    assert pearson((1.0, 2.0, 3.0, 4.0), (1.0, 3.0, 2.0, 4.0)) == 0.8


def test_pearson_perfect_and_inverse():
    assert pearson((1.0, 2.0, 3.0), (10.0, 20.0, 30.0)) == pytest.approx(1.0)
    assert pearson((1.0, 2.0, 3.0), (3.0, 2.0, 1.0)) == pytest.approx(-1.0)


def test_pearson_errors():
    with pytest.raises(ValueError):
        pearson((1.0, 2.0), (1.0, 2.0, 3.0))
    with pytest.raises(UndefinedCorrelationError):
        pearson((1.0, 2.0), (1.0, 2.0))
    with pytest.raises(UndefinedCorrelationError):
        pearson((1.0, 1.0, 1.0), (1.0, 2.0, 3.0))


def test_subset_speaker_score_means_over_words():
    scores = {"a": 80.0, "b": 60.0, "c": 10.0}
    assert subset_speaker_score(["b", "a"], scores) == pytest.approx(70.0)
    with pytest.raises(ValueError):
        subset_speaker_score(["a", "zz"], scores)
    with pytest.raises(ValueError):
        subset_speaker_score([], scores)


def test_subset_cost_decomposition():
    efforts = {"a": 2, "b": 4, "c": 6}
    result = subset_cost(["c"], efforts, alphas=Alphas(1.0, 0.0, 1.0))
    assert result.size_term == pytest.approx(1 / 3)
    assert result.effort_term == pytest.approx(0.5)
    assert result.cost == pytest.approx(1 / 3 - 0.5)
    assert result.corr_term == 0.0
    assert result.pearson is None

    whole = subset_cost(["a", "b", "c"], efforts, alphas=Alphas(1.0, 0.0, 1.0))
    assert whole.cost == pytest.approx(0.0)


def test_subset_cost_requires_scores_for_correlation():
    efforts = {"a": 1, "b": 2}
    with pytest.raises(ValueError):
        subset_cost(["a"], efforts, alphas=Alphas(1.0, 1.0, 1.0))


def test_subset_cost_unknown_word():
    with pytest.raises(ValueError):
        subset_cost(["zz"], {"a": 1})


def test_subset_cost_signed_versus_absolute():
    efforts = {"a": 1, "b": 2}
    perceptual = {"s0": 10.0, "s1": 50.0, "s2": 90.0}
    metric_scores = {
        "s0": {"a": 90.0, "b": 10.0},
        "s1": {"a": 50.0, "b": 50.0},
        "s2": {"a": 10.0, "b": 90.0},
    }
    plain = subset_cost(["a"], efforts, metric_scores, perceptual)
    signed = subset_cost(
        ["a"], efforts, metric_scores, perceptual, signed_correlation=True
    )
    assert plain.pearson == pytest.approx(-1.0)
    assert plain.corr_term == pytest.approx(1.0)
    assert signed.corr_term == pytest.approx(-1.0)


def test_optimize_above_mean_effort_set():
    rng = random.Random(11)
    for _ in range(60):
        n = rng.randint(2, 10)
        raw = [rng.randint(1, 50) for _ in range(n)]
        # a word sitting exactly on the pool mean makes the optimum a
        # cost tie instead of the strict above-mean set, so skip those
        if len(set(raw)) < 2 or any(e * n == sum(raw) for e in raw):
            continue
        efforts = {f"w{i:02d}": e for i, e in enumerate(raw)}
        result = optimize(efforts, alphas=scenario("dictionary-only"))
        assert result.words == above_mean_words(efforts)


def test_optimize_all_equal_efforts_ties_to_first_singleton():
    efforts = {"a": 5, "b": 5, "c": 5}
    result = optimize(efforts, alphas=scenario("dictionary-only"))
    assert result.words == ("a",)
    assert result.cost == pytest.approx(0.0)


def test_optimize_matches_oracle_with_correlation():
    rng = random.Random(12)
    for trial in range(25):
        efforts, metric_scores, perceptual = random_problem(rng, rng.randint(1, 8))
        for preset in ("full", "correlation-only"):
            alphas = scenario(preset)
            got = optimize(efforts, metric_scores, perceptual, alphas=alphas)
            cost, size, words = subset_oracle(
                efforts,
                metric_scores,
                perceptual,
                alphas=(alphas.a1, alphas.a2, alphas.a3),
            )
            assert got.words == words, (trial, preset)
            assert got.cost == pytest.approx(cost, abs=1e-9)


def test_optimize_needs_scores_when_correlating():
    with pytest.raises(ValueError):
        optimize({"a": 1, "b": 2}, alphas=scenario("full"))


def test_optimize_needs_three_speakers():
    efforts = {"a": 1, "b": 2}
    perceptual = {"s0": 10.0, "s1": 20.0}
    metric_scores = {s: {"a": 1.0, "b": 2.0} for s in perceptual}
    with pytest.raises(UndefinedCorrelationError):
        optimize(efforts, metric_scores, perceptual)


def test_optimize_rejects_constant_perceptual():
    efforts = {"a": 1, "b": 2}
    perceptual = {f"s{j}": 50.0 for j in range(3)}
    metric_scores = {s: {"a": 1.0, "b": 2.0} for s in perceptual}
    with pytest.raises(UndefinedCorrelationError):
        optimize(efforts, metric_scores, perceptual)


def test_optimize_reports_missing_word_scores():
    efforts = {"a": 1, "b": 2}
    perceptual = {f"s{j}": 10.0 * (j + 1) for j in range(3)}
    metric_scores = {s: {"a": 1.0} for s in perceptual}
    with pytest.raises(ValueError, match="b"):
        optimize(efforts, metric_scores, perceptual)


def test_optimize_refuses_oversized_pool():
    efforts = {f"w{i:02d}": i + 1 for i in range(25)}
    with pytest.raises(PoolTooLargeError, match="25"):
        optimize(efforts, alphas=scenario("dictionary-only"))


def test_optimize_greedy_fallback_warns():
    # no effort equals the pool mean, so the above-mean set is the
    # unique optimum and greedy forward selection reaches it
    efforts = {f"w{i:02d}": i + 1 for i in range(25) if i != 12}
    efforts["w25"] = 60
    with pytest.warns(UserWarning, match="greedy"):
        result = optimize(
            efforts, alphas=scenario("dictionary-only"), heuristic=True
        )
    assert result.words == above_mean_words(efforts)


def test_optimize_parallel_matches_serial():
    rng = random.Random(13)
    efforts, metric_scores, perceptual = random_problem(rng, 9, n_speakers=5)
    serial = optimize(efforts, metric_scores, perceptual, workers=1)
    parallel = optimize(efforts, metric_scores, perceptual, workers=4)
    assert parallel == serial


def test_optimize_empty_pool():
    with pytest.raises(ValueError):
        optimize({})
