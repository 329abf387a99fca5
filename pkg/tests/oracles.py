"""Independent naive reference implementations for pinning expected values.

Everything here is deliberately slow and obvious: exponential recursions
and brute-force enumeration define what the fast implementations must
produce on small inputs.
"""
from itertools import combinations
from statistics import correlation
from typing import Dict, Mapping, Optional, Sequence, Tuple


def lev_naive(a: Sequence, b: Sequence) -> int:
    """Plain recursive edit distance; exponential, tiny inputs only."""
    if not a:
        return len(b)
    if not b:
        return len(a)
    if a[0] == b[0]:
        return lev_naive(a[1:], b[1:])
    return 1 + min(
        lev_naive(a[1:], b),
        lev_naive(a, b[1:]),
        lev_naive(a[1:], b[1:]),
    )


def ro_match_naive(a: Sequence, b: Sequence) -> int:
    """Recursive longest-common-block match count.

    Finds the longest common contiguous block (earliest start in a, then
    in b, on ties) and recurses on the pieces to its left and right.
    """
    best_size = 0
    best_i = best_j = 0
    for i in range(len(a)):
        for j in range(len(b)):
            k = 0
            while i + k < len(a) and j + k < len(b) and a[i + k] == b[j + k]:
                k += 1
            if k > best_size:
                best_size, best_i, best_j = k, i, j
    if best_size == 0:
        return 0
    return (
        ro_match_naive(a[:best_i], b[:best_j])
        + best_size
        + ro_match_naive(a[best_i + best_size:], b[best_j + best_size:])
    )


def subset_oracle(
    efforts: Mapping[str, float],
    metric_scores: Optional[Mapping[str, Mapping[str, float]]] = None,
    perceptual: Optional[Mapping[str, float]] = None,
    alphas: Tuple[float, float, float] = (1.0, 1.0, 1.0),
    signed: bool = False,
) -> Tuple[float, int, Tuple[str, ...]]:
    """Enumerate every nonempty subset; returns (cost, size, words).

    Uses statistics.correlation so the correlation arithmetic is
    independent of the package under test.  Ties break on fewer words,
    then lexicographic word tuple.
    """
    a1, a2, a3 = alphas
    words = sorted(efforts)
    total_effort = sum(efforts[w] for w in words)
    speakers = sorted(perceptual) if perceptual else []
    best = None
    for r in range(1, len(words) + 1):
        for combo in combinations(words, r):
            size_term = len(combo) / len(words)
            effort_term = sum(efforts[w] for w in combo) / total_effort
            corr_term = 0.0
            if a2 > 0:
                xs = [
                    sum(metric_scores[s][w] for w in combo) / len(combo)
                    for s in speakers
                ]
                ys = [perceptual[s] for s in speakers]
                value = correlation(xs, ys)
                corr_term = value if signed else abs(value)
            cost = a1 * size_term - a2 * corr_term - a3 * effort_term
            key = (cost, len(combo), combo)
            if best is None or key < best:
                best = key
    assert best is not None
    return best


def above_mean_words(efforts: Mapping[str, float]) -> Tuple[str, ...]:
    """Words whose effort lies strictly above the pool mean."""
    mean = sum(efforts.values()) / len(efforts)
    return tuple(sorted(w for w, e in efforts.items() if e > mean))
