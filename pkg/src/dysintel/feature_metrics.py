"""Acoustic-feature distance scoring against a healthy reference pool.

Utterance-level feature vectors (384 dimensions by convention) are min-max
normalized over the whole corpus, then a dysarthric speaker's distance from
healthy speakers saying the same word is averaged across repetition pairs
and across words.  The score is negatively oriented: larger means farther
from healthy speech.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

FeatureVector = Tuple[float, ...]

STANDARD_DIM = 384


@dataclass(frozen=True)
class NormalizationParams:
    """Per-dimension minima and maxima of the reference population."""

    lo: Tuple[float, ...]
    hi: Tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.lo:
            raise ValueError("dimension must be positive")
        if len(self.lo) != len(self.hi):
            raise ValueError("lo and hi must have the same dimension")
        if any(a > b for a, b in zip(self.lo, self.hi)):
            raise ValueError("per-dimension min must not exceed max")

    @property
    def dim(self) -> int:
        return len(self.lo)

    def constant_dims(self) -> Tuple[int, ...]:
        """Indices of dimensions with no spread in the population."""
        return tuple(i for i, (a, b) in enumerate(zip(self.lo, self.hi)) if a == b)


def fit_normalization(corpus: Sequence[FeatureVector]) -> NormalizationParams:
    """Capture per-dimension min and max over a nonempty vector population."""
    if not corpus:
        raise ValueError("cannot fit normalization on an empty population")
    dim = len(corpus[0])
    lo = list(corpus[0])
    hi = list(corpus[0])
    for vector in corpus[1:]:
        if len(vector) != dim:
            raise ValueError(f"dimension mismatch: {len(vector)} != {dim}")
        for i, x in enumerate(vector):
            if x < lo[i]:
                lo[i] = x
            if x > hi[i]:
                hi[i] = x
    return NormalizationParams(lo=tuple(lo), hi=tuple(hi))


def normalize(v: FeatureVector, p: NormalizationParams) -> FeatureVector:
    """Map each component to [0, 1] by the fitted range.

    Out-of-range values clamp to the boundary; dimensions that were constant
    in the population map to 0 so they contribute nothing to distances.
    """
    if len(v) != p.dim:
        raise ValueError(f"dimension mismatch: {len(v)} != {p.dim}")
    scaled = []
    for x, lo, hi in zip(v, p.lo, p.hi):
        if hi == lo:
            scaled.append(0.0)
            continue
        y = (x - lo) / (hi - lo)
        if y < 0.0:
            y = 0.0
        elif y > 1.0:
            y = 1.0
        scaled.append(y)
    return tuple(scaled)


def feature_distance(a: FeatureVector, b: FeatureVector) -> float:
    """Dimension-averaged Euclidean distance: sqrt(sum of squares) / dim.

    On normalized vectors the value lies in [0, 1/sqrt(dim)].
    """
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} != {len(b)}")
    total = 0.0
    for x, y in zip(a, b):
        d = x - y
        total += d * d
    return math.sqrt(total) / len(a)


def i_os_word(
    speaker_reps: Sequence[FeatureVector],
    healthy_reps: Sequence[FeatureVector],
) -> float:
    """Mean distance over all (speaker repetition, healthy utterance) pairs.

    Distances are accumulated in sorted order so the result is independent
    of how the pool happens to be ordered.
    """
    if not speaker_reps:
        raise ValueError("speaker has no utterances for this word")
    if not healthy_reps:
        raise ValueError("no healthy reference utterances for this word")
    distances = sorted(
        feature_distance(mine, ref) for mine in speaker_reps for ref in healthy_reps
    )
    total = 0.0
    for d in distances:
        total += d
    return total / len(distances)


def i_os_speaker(word_values: Sequence[float]) -> float:
    """Mean of per-word distance scores over the speaker's word set."""
    if not word_values:
        raise ValueError("no per-word values to average")
    total = 0.0
    for value in word_values:
        total += value
    return total / len(word_values)
