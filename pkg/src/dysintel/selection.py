"""Pearson correlation, subset cost and the optimal-word-set search.

A candidate subset is priced by three normalized terms: its relative size,
the absolute correlation between per-subset speaker scores and perceptual
scores, and its share of the pool's articulatory effort.  The optimal
subset minimizes size while maximizing correlation and effort, found by
exhaustive enumeration of every nonempty subset.

Determinism contract: the search visits subsets grouped by their lowest
word index, accumulates every sum in ascending word order, and breaks cost
ties by subset size then lexicographic word list.  The scalar cost function
follows the same accumulation order, so search results are bit-identical
for any worker count and match a straightforward single-threaded sweep.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from multiprocessing import get_context
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple


class UndefinedCorrelationError(ValueError):
    """Raised when a correlation is requested on degenerate series."""


class PoolTooLargeError(ValueError):
    """Raised when exhaustive search would exceed the subset budget."""


@dataclass(frozen=True)
class Alphas:
    """Cost weights for the size, correlation and effort terms."""

    a1: float = 1.0
    a2: float = 1.0
    a3: float = 1.0

    def __post_init__(self) -> None:
        if self.a1 < 0 or self.a2 < 0 or self.a3 < 0:
            raise ValueError("cost weights must be nonnegative")
        if self.a1 == 0 and self.a2 == 0 and self.a3 == 0:
            raise ValueError("at least one cost weight must be positive")


SCENARIOS = {
    "dictionary-only": Alphas(1.0, 0.0, 1.0),
    "correlation-only": Alphas(1.0, 1.0, 0.0),
    "full": Alphas(1.0, 1.0, 1.0),
}


def scenario(preset: str) -> Alphas:
    """Alpha weights for a named selection scenario."""
    try:
        return SCENARIOS[preset]
    except KeyError:
        raise ValueError(
            f"unknown scenario {preset!r}; choose from {sorted(SCENARIOS)}"
        ) from None


@dataclass(frozen=True)
class SubsetResult:
    """A priced subset: sorted words plus the cost decomposition."""

    words: Tuple[str, ...]
    cost: float
    size_term: float
    corr_term: float
    effort_term: float
    pearson: Optional[float]


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Sample Pearson correlation coefficient of two equal-length series."""
    if len(xs) != len(ys):
        raise ValueError(f"series length mismatch: {len(xs)} != {len(ys)}")
    n = len(xs)
    if n < 3:
        raise UndefinedCorrelationError(f"need at least 3 points, got {n}")
    sum_x = 0.0
    sum_y = 0.0
    for x, y in zip(xs, ys):
        sum_x += x
        sum_y += y
    mean_x = sum_x / n
    mean_y = sum_y / n
    sxx = 0.0
    syy = 0.0
    sxy = 0.0
    for x, y in zip(xs, ys):
        dx = x - mean_x
        dy = y - mean_y
        sxx += dx * dx
        syy += dy * dy
        sxy += dx * dy
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedCorrelationError("correlation undefined for a constant series")
    return sxy / math.sqrt(sxx * syy)


def subset_speaker_score(
    words: Iterable[str], scores_by_word: Mapping[str, float]
) -> float:
    """Unweighted mean of one speaker's per-word scores over a subset."""
    subset = sorted(words)
    if not subset:
        raise ValueError("empty subset")
    total = 0.0
    for word in subset:
        if word not in scores_by_word:
            raise ValueError(f"no score for word {word!r}")
        total += scores_by_word[word]
    return total / len(subset)


def _cost_value(alphas: Alphas, size_term: float, corr_term: float, effort_term: float) -> float:
    return alphas.a1 * size_term - alphas.a2 * corr_term - alphas.a3 * effort_term


def _total_effort(pool_efforts: Mapping[str, float]) -> float:
    total = 0.0
    for word in sorted(pool_efforts):
        total += pool_efforts[word]
    if total <= 0:
        raise ValueError("pool effort must be positive")
    return total


def subset_cost(
    words: Iterable[str],
    pool_efforts: Mapping[str, float],
    metric_scores: Optional[Mapping[str, Mapping[str, float]]] = None,
    perceptual: Optional[Mapping[str, float]] = None,
    alphas: Alphas = Alphas(),
    signed_correlation: bool = False,
) -> SubsetResult:
    """Price one subset of the candidate pool.

    size_term is |subset| / |pool|, effort_term is the subset's share of the
    pool's total effort, and corr_term is the correlation (absolute by
    default) across dysarthric speakers between per-subset mean metric
    scores and perceptual scores.  corr_term is only computed when its
    weight is positive, so effort-and-size pricing needs no speaker data.
    """
    subset = tuple(sorted(set(words)))
    if not subset:
        raise ValueError("empty subset")
    for word in subset:
        if word not in pool_efforts:
            raise ValueError(f"word {word!r} not in candidate pool")
    n = len(pool_efforts)
    effort_sum = 0.0
    for word in subset:
        effort_sum += pool_efforts[word]
    size_term = len(subset) / n
    effort_term = effort_sum / _total_effort(pool_efforts)

    pearson_value: Optional[float] = None
    corr_term = 0.0
    if alphas.a2 > 0:
        if metric_scores is None or perceptual is None:
            raise ValueError("correlation term requires metric and perceptual scores")
        speakers = sorted(perceptual)
        xs = []
        for speaker in speakers:
            if speaker not in metric_scores:
                raise ValueError(f"no metric scores for speaker {speaker!r}")
            xs.append(subset_speaker_score(subset, metric_scores[speaker]))
        ys = [perceptual[s] for s in speakers]
        pearson_value = pearson(xs, ys)
        corr_term = pearson_value if signed_correlation else abs(pearson_value)

    cost = _cost_value(alphas, size_term, corr_term, effort_term)
    return SubsetResult(
        words=subset,
        cost=cost,
        size_term=size_term,
        corr_term=corr_term,
        effort_term=effort_term,
        pearson=pearson_value,
    )


# one search task: all subsets whose lowest word index equals the task index
_BranchTask = Tuple[
    int,  # first word index
    Tuple[str, ...],  # pool words, sorted
    Tuple[float, ...],  # per-word efforts
    Tuple[Tuple[float, ...], ...],  # per-speaker score columns
    Tuple[float, ...],  # perceptual values, same speaker order
    float,  # a1
    float,  # a2
    float,  # a3
    bool,  # signed correlation
    float,  # total pool effort
]

_BranchBest = Tuple[float, int, Tuple[str, ...]]


def _search_branch(task: _BranchTask) -> _BranchBest:
    (first, words, efforts, columns, ys, a1, a2, a3, signed, total_effort) = task
    n = len(words)
    alphas = Alphas(a1, a2, a3)
    use_corr = a2 > 0
    best: Optional[_BranchBest] = None

    def visit(index: int, size: int, effort_sum: float,
              speaker_sums: Tuple[float, ...], path: Tuple[str, ...]) -> None:
        nonlocal best
        effort_sum = effort_sum + efforts[index]
        speaker_sums = tuple(s + col[index] for s, col in zip(speaker_sums, columns))
        path = path + (words[index],)
        size += 1
        corr_term = 0.0
        if use_corr:
            xs = [s / size for s in speaker_sums]
            r = pearson(xs, ys)
            corr_term = r if signed else abs(r)
        cost = _cost_value(alphas, size / n, corr_term, effort_sum / total_effort)
        key = (cost, size, path)
        if best is None or key < best:
            best = key
        for nxt in range(index + 1, n):
            visit(nxt, size, effort_sum, speaker_sums, path)

    visit(first, 0, 0.0, (0.0,) * len(columns), ())
    assert best is not None
    return best


def optimize(
    pool_efforts: Mapping[str, float],
    metric_scores: Optional[Mapping[str, Mapping[str, float]]] = None,
    perceptual: Optional[Mapping[str, float]] = None,
    alphas: Alphas = Alphas(),
    max_exhaustive_n: int = 24,
    workers: int = 1,
    heuristic: bool = False,
    signed_correlation: bool = False,
) -> SubsetResult:
    """Find the cost-minimizing nonempty subset of the candidate pool.

    Pools up to max_exhaustive_n words are searched exhaustively (2^n - 1
    subsets); larger pools are refused unless heuristic greedy forward
    selection is explicitly requested.  Ties are broken by fewer words,
    then lexicographically smallest word list.  The result is identical
    for any worker count.
    """
    words = tuple(sorted(pool_efforts))
    n = len(words)
    if n == 0:
        raise ValueError("empty candidate pool")
    if n > max_exhaustive_n:
        if not heuristic:
            raise PoolTooLargeError(
                f"pool of {n} words exceeds the exhaustive-search limit of "
                f"{max_exhaustive_n}; pass heuristic=True for greedy selection"
            )
        return _greedy(
            pool_efforts, metric_scores, perceptual, alphas, signed_correlation
        )

    total_effort = _total_effort(pool_efforts)
    efforts = tuple(float(pool_efforts[w]) for w in words)

    if alphas.a2 > 0:
        if metric_scores is None or perceptual is None:
            raise ValueError("correlation term requires metric and perceptual scores")
        speakers = sorted(perceptual)
        if len(speakers) < 3:
            raise UndefinedCorrelationError(
                f"need at least 3 scored speakers, got {len(speakers)}"
            )
        ys = tuple(float(perceptual[s]) for s in speakers)
        if min(ys) == max(ys):
            raise UndefinedCorrelationError("perceptual scores are constant")
        columns = []
        for speaker in speakers:
            scores = metric_scores.get(speaker)
            if scores is None:
                raise ValueError(f"no metric scores for speaker {speaker!r}")
            missing = [w for w in words if w not in scores]
            if missing:
                raise ValueError(
                    f"speaker {speaker!r} lacks scores for {', '.join(missing)}"
                )
            columns.append(tuple(float(scores[w]) for w in words))
        columns = tuple(columns)
    else:
        ys = ()
        columns = ()

    tasks: List[_BranchTask] = [
        (
            first,
            words,
            efforts,
            columns,
            ys,
            alphas.a1,
            alphas.a2,
            alphas.a3,
            signed_correlation,
            total_effort,
        )
        for first in range(n)
    ]

    if workers > 1 and len(tasks) > 1:
        context = get_context("spawn")
        with ProcessPoolExecutor(
            max_workers=min(workers, len(tasks)), mp_context=context
        ) as executor:
            branch_bests = list(executor.map(_search_branch, tasks))
    else:
        branch_bests = [_search_branch(task) for task in tasks]

    best = min(branch_bests)
    return subset_cost(
        best[2],
        pool_efforts,
        metric_scores=metric_scores,
        perceptual=perceptual,
        alphas=alphas,
        signed_correlation=signed_correlation,
    )


def _greedy(
    pool_efforts: Mapping[str, float],
    metric_scores: Optional[Mapping[str, Mapping[str, float]]],
    perceptual: Optional[Mapping[str, float]],
    alphas: Alphas,
    signed_correlation: bool,
) -> SubsetResult:
    """Greedy forward selection; deterministic but not guaranteed optimal."""
    warnings.warn("greedy selection is not guaranteed optimal", stacklevel=3)
    pool = sorted(pool_efforts)
    chosen: List[str] = []
    best: Optional[SubsetResult] = None
    while True:
        step_best: Optional[SubsetResult] = None
        for word in pool:
            if word in chosen:
                continue
            result = subset_cost(
                chosen + [word],
                pool_efforts,
                metric_scores=metric_scores,
                perceptual=perceptual,
                alphas=alphas,
                signed_correlation=signed_correlation,
            )
            key = (result.cost, len(result.words), result.words)
            if step_best is None or key < (step_best.cost, len(step_best.words), step_best.words):
                step_best = result
        if step_best is None:
            break
        if best is not None and (best.cost, len(best.words), best.words) <= (
            step_best.cost,
            len(step_best.words),
            step_best.words,
        ):
            break
        best = step_best
        chosen = list(step_best.words)
    assert best is not None
    return best
