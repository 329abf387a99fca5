"""Transcript-based intelligibility scores and their per-speaker aggregation.

Three scores compare a normalized hypothesis stream against the ground-truth
spelling of the prompted word: one from gestalt sequence matching, one from
edit distance and one from the rate of unknown-token events.  All three are
scaled to [0, 100]; higher means more intelligible.
"""
from __future__ import annotations

from dataclasses import dataclass
from difflib import SequenceMatcher
from typing import Mapping, Sequence

from .strops import SPACE, UNK, CharSeq, count_pattern, delete, squeeze


@dataclass(frozen=True)
class NormalizedHypothesis:
    """Collapsed, unknown- and space-free stream plus the unknown-run count."""

    s1: CharSeq
    unk_count: int

    def __post_init__(self) -> None:
        if UNK in self.s1 or SPACE in self.s1:
            raise ValueError("normalized hypothesis must be free of unk and space")
        if self.unk_count < 0:
            raise ValueError("unk_count must be nonnegative")

    @property
    def l1(self) -> int:
        return len(self.s1)


@dataclass(frozen=True)
class GroundTruth:
    """Reference spelling of the prompted word, letters and apostrophes only."""

    s_g: CharSeq

    def __post_init__(self) -> None:
        if len(self.s_g) < 1:
            raise ValueError("ground truth must be nonempty")
        if UNK in self.s_g or SPACE in self.s_g:
            raise ValueError("ground truth must be free of unk and space")

    @property
    def l_g(self) -> int:
        return len(self.s_g)


@dataclass(frozen=True)
class UtteranceScore:
    metric: str  # "sm", "ld" or "unk"
    value: float

    def __post_init__(self) -> None:
        if self.metric not in ("sm", "ld", "unk"):
            raise ValueError(f"unknown metric {self.metric!r}")
        if not 0.0 <= self.value <= 100.0:
            raise ValueError(f"score out of range: {self.value}")


def normalize_hypothesis(c_star: CharSeq) -> NormalizedHypothesis:
    """Collapse runs, then strip unknown and space tokens.

    The unknown count is taken on the collapsed stream before deletion, so
    one sustained unknown region counts as a single event.
    """
    squeezed = squeeze(c_star)
    s1 = delete(delete(squeezed, UNK), SPACE)
    return NormalizedHypothesis(s1=s1, unk_count=count_pattern(squeezed, UNK))


def matching_chars(a: CharSeq, b: CharSeq) -> int:
    """Total matched tokens under recursive longest-common-substring matching.

    The longest common contiguous block is located (ties broken by earliest
    start in a, then in b), counted, and the regions to its left and right
    are matched recursively.  SequenceMatcher implements exactly this
    recursion; autojunk is disabled so no token is ever discarded as noise.
    """
    sm = SequenceMatcher(None, a, b, autojunk=False)
    return sum(block.size for block in sm.get_matching_blocks())


def score_sm(h: NormalizedHypothesis, g: GroundTruth) -> UtteranceScore:
    """Matching-token score: 100 * 2m / (l1 + lg)."""
    m = matching_chars(h.s1, g.s_g)
    return UtteranceScore("sm", 100.0 * (2 * m) / (h.l1 + g.l_g))


def edit_distance(a: CharSeq, b: CharSeq) -> int:
    """Unit-cost Levenshtein distance between two token sequences."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ta in enumerate(a, start=1):
        current = [i]
        for j, tb in enumerate(b, start=1):
            cost = 0 if ta == tb else 1
            current.append(
                min(
                    previous[j] + 1,  # deletion
                    current[j - 1] + 1,  # insertion
                    previous[j - 1] + cost,  # substitution
                )
            )
        previous = current
    return previous[len(b)]


def score_ld(h: NormalizedHypothesis, g: GroundTruth) -> UtteranceScore:
    """Edit-distance score: (1 - l / (l1 + lg)) * 100."""
    l = edit_distance(h.s1, g.s_g)
    return UtteranceScore("ld", (1.0 - l / (h.l1 + g.l_g)) * 100.0)


def score_unk(h: NormalizedHypothesis, g: GroundTruth) -> UtteranceScore:
    """Unknown-rate score: (1 - min(unk_count / lg, 1)) * 100."""
    rate = min(h.unk_count / g.l_g, 1.0)
    return UtteranceScore("unk", (1.0 - rate) * 100.0)


def aggregate_speaker(scores_by_word: Mapping[str, Sequence[float]]) -> float:
    """Two-stage mean: per-word mean over repetitions, then mean over words.

    Averaging repetitions first gives every distinct word equal weight even
    when words differ in repetition count.
    """
    if not scores_by_word:
        raise ValueError("no scores to aggregate")
    total = 0.0
    for word in sorted(scores_by_word):
        reps = scores_by_word[word]
        if not reps:
            raise ValueError(f"no repetitions for word {word!r}")
        word_mean = 0.0
        for value in reps:
            word_mean += value
        total += word_mean / len(reps)
    return total / len(scores_by_word)
