"""Generate a small synthetic corpus for demos and end-to-end tests.

The corpus mimics the shape of an isolated-word recording session: three
healthy reference speakers and five dysarthric speakers spanning the
severity range, reading the bundled 14 candidate words.  Ten words play
the role of common words with three repetitions (one per block); four play
uncommon words with a single repetition.  Recognition hypotheses are
character streams derived from the spelling with severity-scaled
corruption (substitutions, deletions, unknown-token insertions) plus
CTC-style repeats; feature vectors are a per-word base plus severity-scaled
noise.  Everything is driven by one seeded generator, so a given seed
always produces byte-identical files.
"""
from __future__ import annotations

import argparse
import random
from pathlib import Path
from typing import Dict, List, Tuple

from dysintel.corpus import category_for_score
from dysintel.phonetics import load_lexicon
from dysintel.strops import LETTERS, UNK

HEALTHY_SPEAKERS = ("H01", "H02", "H03")
# dysarthric speakers with their listener-assessed intelligibility
DYSARTHRIC_SPEAKERS = (("D01", 92.0), ("D02", 71.0), ("D03", 55.0), ("D04", 34.0), ("D05", 13.0))

UNCOMMON_COUNT = 4
BLOCKS = ("B1", "B2", "B3")


def _severity(perceptual: float) -> float:
    return (100.0 - perceptual) / 100.0


def _hypothesis(rng: random.Random, word: str, severity: float) -> List[str]:
    """Corrupted character stream for one utterance."""
    p_sub = 0.5 * severity
    p_del = 0.2 * severity
    p_unk = 0.4 * severity
    letters = sorted(LETTERS)
    tokens: List[str] = []
    for char in word:
        if rng.random() < p_del:
            continue
        if rng.random() < p_sub:
            char = rng.choice(letters)
        tokens.append(char)
        if rng.random() < p_unk:
            tokens.append(UNK)
    # CTC emits one token per frame, so every surviving token may repeat
    stream: List[str] = []
    for token in tokens:
        stream.extend([token] * rng.randint(1, 3))
    return stream


def _feature_row(
    rng: random.Random, base: Tuple[float, ...], severity: float
) -> Tuple[float, ...]:
    sigma = 0.02 + 0.25 * severity
    return tuple(value + rng.gauss(0.0, sigma) for value in base)


def build_fixture(out_dir: Path | str, seed: int = 7, dim: int = 384) -> Path:
    """Write the four corpus files into out_dir and return it."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(seed)

    lexicon = load_lexicon()
    words = sorted(lexicon)
    common = words[: len(words) - UNCOMMON_COUNT]
    uncommon = words[len(words) - UNCOMMON_COUNT:]

    lines = [f"{word} {' '.join(lexicon[word].phones)}" for word in words]
    (out / "lexicon.txt").write_text("".join(line + "\n" for line in lines))

    lines = ["speaker_id,score,category"]
    for sid in HEALTHY_SPEAKERS:
        lines.append(f"{sid},,")
    for sid, perceptual in DYSARTHRIC_SPEAKERS:
        lines.append(f"{sid},{perceptual:g},{category_for_score(perceptual)}")
    (out / "perceptual.csv").write_text("".join(line + "\n" for line in lines))

    severities: Dict[str, float] = {sid: 0.0 for sid in HEALTHY_SPEAKERS}
    severities.update((sid, _severity(p)) for sid, p in DYSARTHRIC_SPEAKERS)
    speakers = sorted(severities)

    # every speaker reads the same plan: common words thrice, uncommon once
    plan: List[Tuple[str, int, str, str]] = []
    for word in common:
        for rep in (1, 2, 3):
            plan.append((word, rep, BLOCKS[rep - 1], "CW"))
    for index, word in enumerate(uncommon):
        plan.append((word, 1, BLOCKS[index % len(BLOCKS)], "UW"))

    bases = {
        word: tuple(rng.random() for _ in range(dim)) for word in words
    }

    transcript_lines: List[str] = []
    feature_lines = ["utterance_id," + ",".join(f"f{i}" for i in range(dim))]
    for sid in speakers:
        severity = severities[sid]
        for word, rep, block, category in plan:
            stream = _hypothesis(rng, word, severity)
            line = f"{sid} {word} {rep} {block} {category}"
            if stream:
                line += " " + " ".join(stream)
            transcript_lines.append(line)
            row = _feature_row(rng, bases[word], severity)
            feature_lines.append(
                f"{sid}:{word}:{rep}," + ",".join(f"{v:.6f}" for v in row)
            )
    (out / "transcripts.txt").write_text(
        "".join(line + "\n" for line in transcript_lines)
    )
    (out / "features.csv").write_text("".join(line + "\n" for line in feature_lines))
    return out


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--dim", type=int, default=384)
    args = parser.parse_args()
    path = build_fixture(args.out, seed=args.seed, dim=args.dim)
    print(f"wrote corpus to {path}")


if __name__ == "__main__":
    main()
