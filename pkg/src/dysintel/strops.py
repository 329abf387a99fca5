"""String operations over the 29-token character alphabet.

A character stream is a sequence of tokens emitted one per timestep by a
speech-to-alphabet engine: the 26 lowercase letters, a space, an apostrophe
and an unknown marker.  The unknown marker is a single atomic token, never
five characters.  Streams are modelled as tuples of token strings so they
are hashable and immutable; every operation here is a pure function.
"""
from __future__ import annotations

from itertools import groupby
from typing import Iterable, Tuple

UNK = "<unk>"
SPACE = "_"
APOSTROPHE = "'"
LETTERS = tuple("abcdefghijklmnopqrstuvwxyz")

# letters + space + apostrophe + unk
ALPHABET: Tuple[str, ...] = LETTERS + (SPACE, APOSTROPHE, UNK)
_ALPHABET_SET = frozenset(ALPHABET)

CharSeq = Tuple[str, ...]


def is_token(value: str) -> bool:
    return value in _ALPHABET_SET


def char_seq(tokens: Iterable[str]) -> CharSeq:
    """Build a validated CharSeq from an iterable of tokens."""
    seq = tuple(tokens)
    for t in seq:
        if t not in _ALPHABET_SET:
            raise ValueError(f"invalid token {t!r}")
    return seq


def parse_seq(text: str) -> CharSeq:
    """Parse a whitespace-separated token string, e.g. 'n a _ t <unk>'."""
    return char_seq(text.split())


def format_seq(s: CharSeq) -> str:
    return " ".join(s)


def from_word(word: str) -> CharSeq:
    """Spell an orthographic word as a CharSeq of letter/apostrophe tokens."""
    if not word:
        raise ValueError("word must be nonempty")
    seq = tuple(word)
    for t in seq:
        if t not in _ALPHABET_SET or t == UNK or t == SPACE:
            raise ValueError(f"invalid character {t!r} in word {word!r}")
    return seq


def count_pattern(s: CharSeq, p: str) -> int:
    """Number of positions in s holding the token p."""
    return sum(1 for t in s if t == p)


def length(s: CharSeq) -> int:
    """Token count of s (not rendered characters)."""
    return len(s)


def squeeze(s: CharSeq) -> CharSeq:
    """Collapse every maximal run of identical adjacent tokens to one token."""
    return tuple(k for k, _ in groupby(s))


def delete(s: CharSeq, p: str) -> CharSeq:
    """Remove all occurrences of the token p, preserving the rest in order."""
    return tuple(t for t in s if t != p)
