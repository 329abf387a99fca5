"""Pronunciation lexicon, articulatory expansion and vowel-space traversal.

Words carry one ARPABET pronunciation.  A word's difficulty is probed two
ways: by expanding its phones into articulatory state vectors (see
visible_speech) and by measuring the path length its vowel sequence sweeps
through the F1-F2 formant plane starting from a rest origin.
"""
from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Mapping, Tuple

from .strops import from_word
from .visible_speech import (
    DATA_DIR_ENV,
    SymbolTable,
    VsSequence,
    data_file,
    load_symbol_table,
)

# the 39-phone ARPABET inventory
VOWEL_PHONES = (
    "AA", "AE", "AH", "AO", "AW", "AY", "EH", "ER",
    "EY", "IH", "IY", "OW", "OY", "UH", "UW",
)
CONSONANT_PHONES = (
    "B", "CH", "D", "DH", "F", "G", "HH", "JH", "K", "L", "M", "N",
    "NG", "P", "R", "S", "SH", "T", "TH", "V", "W", "Y", "Z", "ZH",
)
ARPABET_PHONES = VOWEL_PHONES + CONSONANT_PHONES
_PHONE_SET = frozenset(ARPABET_PHONES)
_VOWEL_SET = frozenset(VOWEL_PHONES)


@dataclass(frozen=True)
class LexEntry:
    """One lexicon row: orthographic word plus its phone sequence."""

    word: str
    phones: Tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.phones:
            raise ValueError(f"no phones for word {self.word!r}")
        for phone in self.phones:
            if phone not in _PHONE_SET:
                raise ValueError(f"invalid phone {phone!r} in word {self.word!r}")


@dataclass(frozen=True)
class FormantPoint:
    """First and second formant target in Hz."""

    f1: float
    f2: float

    def __post_init__(self) -> None:
        if self.f1 < 0 or self.f2 < 0:
            raise ValueError("formant frequencies must be nonnegative")


@dataclass(frozen=True)
class FormantTable:
    """Direct vowel targets plus two-vowel paths for gliding vowels."""

    points: Dict[str, FormantPoint]
    paths: Dict[str, Tuple[str, str]]


Lexicon = Dict[str, LexEntry]
VsMap = Dict[str, Tuple[str, ...]]


def strip_stress(phone: str) -> str:
    """Drop a trailing stress digit, e.g. AE1 -> AE."""
    if phone and phone[-1].isdigit():
        return phone[:-1]
    return phone


def parse_lexicon_lines(lines, source: str) -> Lexicon:
    lexicon: Lexicon = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) < 2:
            raise ValueError(f"{source}:{lineno}: expected 'word PHONE...', got {raw!r}")
        word = fields[0]
        try:
            from_word(word)
        except ValueError as exc:
            raise ValueError(f"{source}:{lineno}: {exc}") from None
        if word in lexicon:
            raise ValueError(f"{source}:{lineno}: duplicate word {word!r}")
        phones = tuple(strip_stress(p) for p in fields[1:])
        try:
            lexicon[word] = LexEntry(word=word, phones=phones)
        except ValueError as exc:
            raise ValueError(f"{source}:{lineno}: {exc}") from None
    if not lexicon:
        raise ValueError(f"{source}: no lexicon entries")
    return lexicon


@lru_cache(maxsize=None)
def _load_lexicon_cached(path_str: str) -> Lexicon:
    path = Path(path_str)
    with open(path, "r", encoding="utf-8") as handle:
        return parse_lexicon_lines(handle, str(path))


def load_lexicon(path: "str | Path | None" = None) -> Lexicon:
    """Load a lexicon file; defaults to the bundled candidate word list."""
    resolved = Path(path) if path is not None else data_file("candidate_lexicon.txt")
    return _load_lexicon_cached(str(resolved))


@lru_cache(maxsize=None)
def _load_formants_cached(path_str: str) -> FormantTable:
    path = Path(path_str)
    points: Dict[str, FormantPoint] = {}
    paths: Dict[str, Tuple[str, str]] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            if fields[0] == "vowel" and len(fields) == 4:
                vowel = fields[1]
                if vowel in points:
                    raise ValueError(f"{path}:{lineno}: duplicate vowel {vowel!r}")
                try:
                    points[vowel] = FormantPoint(float(fields[2]), float(fields[3]))
                except ValueError as exc:
                    raise ValueError(f"{path}:{lineno}: {exc}") from None
            elif fields[0] == "diphthong" and len(fields) == 4:
                vowel = fields[1]
                if vowel in paths:
                    raise ValueError(f"{path}:{lineno}: duplicate diphthong {vowel!r}")
                paths[vowel] = (fields[2], fields[3])
            else:
                raise ValueError(f"{path}:{lineno}: unrecognized record {raw!r}")
    for vowel, (first, second) in paths.items():
        if first not in points or second not in points:
            raise ValueError(f"{path}: diphthong {vowel!r} references unknown vowels")
    return FormantTable(points=points, paths=paths)


def load_formants(path: "str | Path | None" = None) -> FormantTable:
    """Load formant targets; defaults to the bundled table."""
    resolved = Path(path) if path is not None else data_file("formants.txt")
    return _load_formants_cached(str(resolved))


# reference expansion for the bundled tables; guards against accidental edits
_REFERENCE_PHONES = ("N", "AE", "CH", "ER", "AH", "L", "IH", "Z", "EY", "SH", "AH", "N")
_REFERENCE_BITS = (
    "1000010001",
    "1001000000",
    "1000010100",
    "0110000000",
    "1000010000",
    "1010000000",
    "1000001000",
    "1010000000",
    "1000010000",
    "0000010100",
    "1001000000",
    "0000010100",
    "1010000000",
    "1000010001",
)


def _check_reference_expansion(vs_map: VsMap, symbols: SymbolTable, source: str) -> None:
    bits: List[str] = []
    for phone in _REFERENCE_PHONES:
        for symbol in vs_map.get(phone, ()):
            bits.append(symbols.vector(symbol).bitstring())
    if tuple(bits) != _REFERENCE_BITS:
        raise ValueError(f"{source}: phone map does not reproduce the reference expansion")


@lru_cache(maxsize=None)
def _load_vs_map_cached(path_str: str, check_reference: bool) -> VsMap:
    path = Path(path_str)
    vs_map: VsMap = {}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            if len(fields) < 2:
                raise ValueError(f"{path}:{lineno}: expected 'PHONE symbol...', got {raw!r}")
            phone = fields[0]
            if phone not in _PHONE_SET:
                raise ValueError(f"{path}:{lineno}: invalid phone {phone!r}")
            if phone in vs_map:
                raise ValueError(f"{path}:{lineno}: duplicate phone {phone!r}")
            vs_map[phone] = tuple(fields[1:])
    if check_reference:
        _check_reference_expansion(vs_map, load_symbol_table(), str(path))
    return vs_map


def load_vs_map(path: "str | Path | None" = None) -> VsMap:
    """Load the phone-to-symbol map; the bundled map is verified against a
    built-in reference expansion."""
    if path is None:
        resolved = data_file("arpabet_vs_map.txt")
        check = os.environ.get(DATA_DIR_ENV) is None
    else:
        resolved = Path(path)
        check = False
    return _load_vs_map_cached(str(resolved), check)


def formant_lookup(vowel: str, table: "FormantTable | None" = None) -> FormantPoint:
    """Direct F1-F2 target of a vowel phone."""
    table = table if table is not None else load_formants()
    if vowel in table.points:
        return table.points[vowel]
    if vowel in table.paths:
        first, second = table.paths[vowel]
        raise KeyError(
            f"{vowel!r} has no single formant target; it traverses {first} then {second}"
        )
    raise KeyError(f"no formant data for {vowel!r}")


def syllable_count(entry: LexEntry) -> int:
    """Number of vowel-nucleus phones in the pronunciation."""
    count = sum(1 for phone in entry.phones if phone in _VOWEL_SET)
    if count == 0:
        warnings.warn(f"no vowel phones in {entry.word!r}", stacklevel=2)
    return count


def _vowel_points(entry: LexEntry, table: FormantTable) -> List[FormantPoint]:
    points: List[FormantPoint] = []
    for phone in entry.phones:
        if phone not in _VOWEL_SET:
            continue
        if phone in table.points:
            points.append(table.points[phone])
        elif phone in table.paths:
            first, second = table.paths[phone]
            points.append(table.points[first])
            points.append(table.points[second])
        else:
            raise KeyError(f"no formant data for vowel {phone!r} in {entry.word!r}")
    return points


def vowel_traversal(entry: LexEntry, table: "FormantTable | None" = None) -> float:
    """Path length (Hz) swept through the F1-F2 plane by the vowel sequence.

    The path starts at the rest origin (0, 0), so a single-vowel word already
    has a nonzero traversal.
    """
    table = table if table is not None else load_formants()
    points = _vowel_points(entry, table)
    if not points:
        raise ValueError(f"no vowel phones in {entry.word!r}")
    total = 0.0
    f1, f2 = 0.0, 0.0
    for point in points:
        total += math.hypot(point.f1 - f1, point.f2 - f2)
        f1, f2 = point.f1, point.f2
    return total


def arpabet_to_vs(
    entry: LexEntry,
    vs_map: "VsMap | None" = None,
    symbols: "SymbolTable | None" = None,
) -> VsSequence:
    """Expand a pronunciation into its articulatory state sequence.

    Phones mapping to a nucleus plus glide contribute two states, so the
    sequence can be longer than the phone list.
    """
    vs_map = vs_map if vs_map is not None else load_vs_map()
    symbols = symbols if symbols is not None else load_symbol_table()
    vectors = []
    for phone in entry.phones:
        if phone not in vs_map:
            raise KeyError(f"no articulatory mapping for phone {phone!r} in {entry.word!r}")
        for symbol in vs_map[phone]:
            vectors.append(symbols.vector(symbol))
    return tuple(vectors)


def filter_candidates(
    lexicon: Mapping[str, LexEntry],
    min_syllables: int = 5,
    min_traversal: float = 2400.0,
    table: "FormantTable | None" = None,
) -> List[str]:
    """Words with at least min_syllables nuclei and traversal above min_traversal.

    Both thresholds are applied as stated: syllable counts at the minimum
    pass, traversals exactly at the minimum do not.  Words without vowels
    never pass.  The result is sorted lexicographically.
    """
    table = table if table is not None else load_formants()
    selected: List[str] = []
    for word in sorted(lexicon):
        entry = lexicon[word]
        nuclei = sum(1 for phone in entry.phones if phone in _VOWEL_SET)
        if nuclei == 0 or nuclei < min_syllables:
            continue
        if vowel_traversal(entry, table) > min_traversal:
            selected.append(word)
    return selected
