"""Ten-bit articulatory states, transition effort and word effort.

Every English sound symbol is expressed over a basis of ten articulatory
radicals.  The effort of moving between two states is the number of radicals
that change, i.e. the popcount of the XOR, and the effort of a word is the
summed effort along its sound sequence starting from the all-zero Rest state.
"""
from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Dict, Iterable, Tuple

# bit order of every serialized state vector
RADICALS = (
    "voice",
    "rounded-voice",
    "vowel-definer",
    "wide-vowel-definer",
    "whisper",
    "mouth-contracted",
    "mouth-divided",
    "mixer",
    "shutter",
    "nasal",
)

DATA_DIR_ENV = "DYSINTEL_DATA_DIR"
_BUNDLED_DATA_DIR = Path(__file__).resolve().parent / "data"


def data_file(name: str) -> Path:
    """Resolve a bundled data file, honouring the data-dir override variable."""
    override = os.environ.get(DATA_DIR_ENV)
    if override:
        return Path(override) / name
    return _BUNDLED_DATA_DIR / name


@dataclass(frozen=True)
class VsVector:
    """One articulatory state: ten bits in RADICALS order."""

    bits: Tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.bits) != len(RADICALS):
            raise ValueError(f"state vector needs {len(RADICALS)} bits, got {len(self.bits)}")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError(f"state vector bits must be 0 or 1: {self.bits}")

    @classmethod
    def from_bits(cls, text: str) -> "VsVector":
        """Parse a compact bitstring such as '1000010001'."""
        if any(c not in "01" for c in text):
            raise ValueError(f"invalid bitstring {text!r}")
        return cls(tuple(int(c) for c in text))

    def bitstring(self) -> str:
        return "".join(str(b) for b in self.bits)


REST = VsVector((0,) * len(RADICALS))

VsSequence = Tuple[VsVector, ...]


def transition_effort(r_i: VsVector, r_k: VsVector) -> int:
    """Number of radicals that change between two states (popcount of XOR)."""
    return sum(a != b for a, b in zip(r_i.bits, r_k.bits))


def word_effort(seq: VsSequence) -> int:
    """Summed transition effort along seq, starting from Rest.

    The Rest transition into the first sound is included; an empty sequence
    costs nothing.
    """
    total = 0
    previous = REST
    for vector in seq:
        total += transition_effort(previous, vector)
        previous = vector
    return total


def effort_histogram(seq: VsSequence) -> Dict[int, int]:
    """Count of each transition-effort value along seq, Rest transition included."""
    counts: Counter[int] = Counter()
    previous = REST
    for vector in seq:
        counts[transition_effort(previous, vector)] += 1
        previous = vector
    return dict(counts)


@dataclass(frozen=True)
class SymbolTable:
    """Immutable mapping from sound-symbol id to articulatory state vector."""

    vectors: Dict[str, VsVector]

    def vector(self, symbol_id: str) -> VsVector:
        try:
            return self.vectors[symbol_id]
        except KeyError:
            raise KeyError(f"unknown sound symbol {symbol_id!r}") from None

    def symbols(self) -> Tuple[str, ...]:
        return tuple(sorted(self.vectors))


# reference vectors for the bundled table; guards against accidental data edits
_REFERENCE_VECTORS = {
    "k": "0000010010",
    "g": "1000010010",
    "n": "1000010001",
    "dh": "1000010110",
    "uw": "0110000000",
    "uh": "0101000000",
}


def _parse_table_lines(lines: Iterable[str], source: str) -> Dict[str, VsVector]:
    vectors: Dict[str, VsVector] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 2:
            raise ValueError(f"{source}:{lineno}: expected 'symbol bits', got {raw!r}")
        symbol, bits = fields
        if symbol in vectors:
            raise ValueError(f"{source}:{lineno}: duplicate symbol {symbol!r}")
        try:
            vectors[symbol] = VsVector.from_bits(bits)
        except ValueError as exc:
            raise ValueError(f"{source}:{lineno}: {exc}") from None
    if not vectors:
        raise ValueError(f"{source}: no symbols defined")
    return vectors


@lru_cache(maxsize=None)
def _load_table_cached(path_str: str, check_reference: bool) -> SymbolTable:
    path = Path(path_str)
    with open(path, "r", encoding="utf-8") as handle:
        vectors = _parse_table_lines(handle, str(path))
    if check_reference:
        for symbol, bits in _REFERENCE_VECTORS.items():
            if symbol not in vectors:
                raise ValueError(f"{path}: reference symbol {symbol!r} missing")
            if vectors[symbol].bitstring() != bits:
                raise ValueError(
                    f"{path}: symbol {symbol!r} is {vectors[symbol].bitstring()}, expected {bits}"
                )
    return SymbolTable(vectors)


def load_symbol_table(path: "str | Path | None" = None) -> SymbolTable:
    """Load a symbol table; with no path, the bundled table is used and
    verified against the built-in reference vectors."""
    if path is None:
        resolved = data_file("vs_symbols.txt")
        check = os.environ.get(DATA_DIR_ENV) is None
    else:
        resolved = Path(path)
        check = False
    return _load_table_cached(str(resolved), check)


def vs_vector(symbol_id: str) -> VsVector:
    """State vector of a sound symbol from the default table."""
    return load_symbol_table().vector(symbol_id)
