"""Corpus data model, file ingestion, validation and report persistence.

A corpus is four files in one directory: a speaker roster with perceptual
scores (perceptual.csv), a pronunciation lexicon (lexicon.txt), one
recognized utterance per line (transcripts.txt) and optional acoustic
feature vectors (features.csv).  Loading cross-references everything,
fails hard on structural errors with file and line context, and collects
non-fatal findings as sorted warnings.  Loaded corpora are immutable.

Reports serialize with 6 decimal places, sorted rows and newline line
endings, so identical inputs produce byte-identical files.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .feature_metrics import (
    STANDARD_DIM,
    FeatureVector,
    NormalizationParams,
    fit_normalization,
)
from .phonetics import LexEntry, parse_lexicon_lines
from .selection import SubsetResult
from .strops import CharSeq, parse_seq

HEALTHY = "healthy"
DYSARTHRIC = "dysarthric"

# word categories: digits, letters, computer commands, common and uncommon words
CATEGORIES = ("D", "L", "CC", "CW", "UW")
BLOCKS = ("B1", "B2", "B3")
SEVERITY_CATEGORIES = ("very-low", "low", "medium", "high")

TRANSCRIPTS_NAME = "transcripts.txt"
FEATURES_NAME = "features.csv"
PERCEPTUAL_NAME = "perceptual.csv"
LEXICON_NAME = "lexicon.txt"


class CorpusError(ValueError):
    """Raised for structural problems in corpus files."""


def category_for_score(score: float) -> str:
    """Severity category for a perceptual score on the 0-100 scale."""
    if not 0 <= score <= 100:
        raise ValueError(f"perceptual score {score} outside [0, 100]")
    if score <= 25:
        return "very-low"
    if score <= 50:
        return "low"
    if score <= 75:
        return "medium"
    return "high"


@dataclass(frozen=True)
class Speaker:
    """Roster entry; dysarthric speakers carry a perceptual score."""

    id: str
    cohort: str
    perceptual: Optional[float] = None
    category: Optional[str] = None

    def __post_init__(self) -> None:
        if self.cohort not in (HEALTHY, DYSARTHRIC):
            raise ValueError(f"unknown cohort {self.cohort!r}")
        if (self.perceptual is not None) != (self.cohort == DYSARTHRIC):
            raise ValueError("perceptual score present iff speaker is dysarthric")
        if self.category is not None:
            if self.perceptual is None:
                raise ValueError("severity category requires a perceptual score")
            expected = category_for_score(self.perceptual)
            if self.category != expected:
                raise ValueError(
                    f"category {self.category!r} does not match score "
                    f"{self.perceptual} (expected {expected!r})"
                )


@dataclass(frozen=True)
class Utterance:
    """One recognized word token with its recognition hypothesis."""

    speaker: str
    word: str
    repetition: int
    block: str
    category: str
    hypothesis: CharSeq
    features: Optional[FeatureVector] = None

    def __post_init__(self) -> None:
        if not 1 <= self.repetition <= 3:
            raise ValueError(f"repetition {self.repetition} outside 1..3")
        if self.block not in BLOCKS:
            raise ValueError(f"unknown block {self.block!r}")
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown category {self.category!r}")
        if self.category == "UW" and self.repetition != 1:
            raise ValueError("uncommon words have a single repetition")

    @property
    def utterance_id(self) -> str:
        return f"{self.speaker}:{self.word}:{self.repetition}"


@dataclass(frozen=True)
class Corpus:
    """Validated, cross-referenced corpus; immutable after loading."""

    speakers: Mapping[str, Speaker]
    lexicon: Mapping[str, LexEntry]
    utterances: Tuple[Utterance, ...]
    feature_dim: Optional[int] = None
    normalization: Optional[NormalizationParams] = None
    warnings: Tuple[str, ...] = ()

    def healthy_ids(self) -> List[str]:
        return sorted(s for s, sp in self.speakers.items() if sp.cohort == HEALTHY)

    def dysarthric_ids(self) -> List[str]:
        return sorted(s for s, sp in self.speakers.items() if sp.cohort == DYSARTHRIC)

    def speaker_utterances(self, speaker_id: str) -> List[Utterance]:
        return [u for u in self.utterances if u.speaker == speaker_id]


def _data_lines(path: Path) -> List[Tuple[int, str]]:
    """Non-blank, non-comment lines of a structured text file."""
    lines = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((lineno, line))
    return lines


def _load_perceptual(path: Path) -> Dict[str, Speaker]:
    speakers: Dict[str, Speaker] = {}
    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        rows = list(reader)
    if not rows or rows[0] != ["speaker_id", "score", "category"]:
        raise CorpusError(f"{path.name}:1: expected header speaker_id,score,category")
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise CorpusError(f"{path.name}:{lineno}: expected 3 fields, got {len(row)}")
        sid, score_text, category = (cell.strip() for cell in row)
        if not sid:
            raise CorpusError(f"{path.name}:{lineno}: empty speaker id")
        if sid in speakers:
            raise CorpusError(f"{path.name}:{lineno}: duplicate speaker {sid!r}")
        try:
            if score_text:
                speakers[sid] = Speaker(
                    id=sid,
                    cohort=DYSARTHRIC,
                    perceptual=float(score_text),
                    category=category or None,
                )
            else:
                if category:
                    raise ValueError("healthy speakers have no severity category")
                speakers[sid] = Speaker(id=sid, cohort=HEALTHY)
        except ValueError as exc:
            raise CorpusError(f"{path.name}:{lineno}: {exc}") from None
    if not speakers:
        raise CorpusError(f"{path.name}: no speakers")
    return {sid: speakers[sid] for sid in sorted(speakers)}


def _load_lexicon(path: Path) -> Dict[str, LexEntry]:
    try:
        return parse_lexicon_lines(path.read_text().splitlines(), source=path.name)
    except ValueError as exc:
        raise CorpusError(str(exc)) from None


def _load_transcripts(
    path: Path, speakers: Mapping[str, Speaker], lexicon: Mapping[str, LexEntry]
) -> List[Utterance]:
    utterances: Dict[Tuple[str, str, int], Utterance] = {}
    for lineno, line in _data_lines(path):
        parts = line.split(maxsplit=5)
        if len(parts) < 5:
            raise CorpusError(
                f"{path.name}:{lineno}: expected "
                "'speaker word rep block category hypothesis...'"
            )
        sid, word, rep_text, block, category = parts[:5]
        hyp_text = parts[5] if len(parts) == 6 else ""
        if sid not in speakers:
            raise CorpusError(f"{path.name}:{lineno}: unknown speaker {sid!r}")
        if word not in lexicon:
            raise CorpusError(f"{path.name}:{lineno}: word {word!r} not in lexicon")
        try:
            repetition = int(rep_text)
        except ValueError:
            raise CorpusError(
                f"{path.name}:{lineno}: repetition {rep_text!r} is not an integer"
            ) from None
        try:
            utterance = Utterance(
                speaker=sid,
                word=word,
                repetition=repetition,
                block=block,
                category=category,
                hypothesis=parse_seq(hyp_text),
            )
        except ValueError as exc:
            raise CorpusError(f"{path.name}:{lineno}: {exc}") from None
        key = (sid, word, repetition)
        if key in utterances:
            raise CorpusError(
                f"{path.name}:{lineno}: duplicate utterance {utterance.utterance_id}"
            )
        utterances[key] = utterance
    return [utterances[key] for key in sorted(utterances)]


def _load_features(
    path: Path,
) -> Tuple[int, Dict[str, FeatureVector]]:
    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        rows = list(reader)
    if not rows or not rows[0] or rows[0][0] != "utterance_id":
        raise CorpusError(f"{path.name}:1: expected header utterance_id,f0,...")
    header = rows[0]
    dim = len(header) - 1
    if dim < 1:
        raise CorpusError(f"{path.name}:1: no feature columns")
    for index, name in enumerate(header[1:]):
        if name != f"f{index}":
            raise CorpusError(
                f"{path.name}:1: feature column {index} is {name!r}, expected 'f{index}'"
            )
    vectors: Dict[str, FeatureVector] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != dim + 1:
            raise CorpusError(
                f"{path.name}:{lineno}: expected {dim} feature values, got {len(row) - 1}"
            )
        uid = row[0].strip()
        if uid in vectors:
            raise CorpusError(f"{path.name}:{lineno}: duplicate utterance id {uid!r}")
        try:
            vectors[uid] = tuple(float(cell) for cell in row[1:])
        except ValueError as exc:
            raise CorpusError(f"{path.name}:{lineno}: {exc}") from None
    return dim, vectors


def load_corpus(
    root: Optional[Path | str] = None,
    *,
    transcripts: Optional[Path | str] = None,
    features: Optional[Path | str] = None,
    perceptual: Optional[Path | str] = None,
    lexicon: Optional[Path | str] = None,
) -> Corpus:
    """Load and cross-validate a corpus directory or explicit file paths.

    Feature vectors are optional; when present they are attached to their
    utterances and min/max normalization is fitted over every vector in
    the corpus so that later scoring is reproducible.  Hard errors carry
    file name and line number; recoverable findings (orphan feature rows,
    missing vectors, unused speakers, nonstandard dimension) are returned
    as sorted warnings on the corpus.
    """
    if root is not None:
        base = Path(root)
        if not base.is_dir():
            raise CorpusError(f"corpus directory {str(base)!r} does not exist")
        transcripts = transcripts or base / TRANSCRIPTS_NAME
        perceptual = perceptual or base / PERCEPTUAL_NAME
        lexicon = lexicon or base / LEXICON_NAME
        if features is None:
            default = base / FEATURES_NAME
            features = default if default.exists() else None
    if transcripts is None or perceptual is None or lexicon is None:
        raise CorpusError("transcripts, perceptual and lexicon paths are required")
    for part in (transcripts, perceptual, lexicon, features):
        if part is not None and not Path(part).is_file():
            raise CorpusError(f"corpus file {str(part)!r} does not exist")

    speakers = _load_perceptual(Path(perceptual))
    lex = _load_lexicon(Path(lexicon))
    utterances = _load_transcripts(Path(transcripts), speakers, lex)

    warnings: List[str] = []
    feature_dim: Optional[int] = None
    normalization: Optional[NormalizationParams] = None
    if features is not None:
        features_path = Path(features)
        feature_dim, vectors = _load_features(features_path)
        if feature_dim != STANDARD_DIM:
            warnings.append(
                f"{features_path.name}: dimension {feature_dim} "
                f"(standard is {STANDARD_DIM})"
            )
        known_ids = {u.utterance_id for u in utterances}
        for uid in vectors:
            if uid not in known_ids:
                warnings.append(
                    f"{features_path.name}: no transcript for utterance {uid!r}"
                )
        attached = []
        for utterance in utterances:
            vector = vectors.get(utterance.utterance_id)
            if vector is None:
                warnings.append(
                    f"{features_path.name}: no feature row for utterance "
                    f"{utterance.utterance_id!r}"
                )
                attached.append(utterance)
            else:
                attached.append(
                    Utterance(
                        speaker=utterance.speaker,
                        word=utterance.word,
                        repetition=utterance.repetition,
                        block=utterance.block,
                        category=utterance.category,
                        hypothesis=utterance.hypothesis,
                        features=vector,
                    )
                )
        utterances = attached
        present = [u.features for u in utterances if u.features is not None]
        if present:
            normalization = fit_normalization(present)

    uttered = {u.speaker for u in utterances}
    for sid in speakers:
        if sid not in uttered:
            warnings.append(f"{Path(perceptual).name}: speaker {sid!r} has no utterances")

    return Corpus(
        speakers=speakers,
        lexicon=lex,
        utterances=tuple(utterances),
        feature_dim=feature_dim,
        normalization=normalization,
        warnings=tuple(sorted(warnings)),
    )


@dataclass(frozen=True)
class CorrelationRow:
    """Pearson summary for one scope (all words, a block or a category)."""

    scope: str
    metric: str
    n_speakers: int
    pearson: Optional[float]

    def __post_init__(self) -> None:
        if self.pearson is not None and self.n_speakers < 3:
            raise ValueError("a reported correlation needs at least 3 pairs")


@dataclass(frozen=True)
class Report:
    """Scoring results for one corpus, ready for persistence."""

    metrics: Tuple[str, ...]
    cohorts: Mapping[str, str]
    perceptual: Mapping[str, float]
    speaker_scores: Mapping[str, Mapping[str, float]]
    correlations: Tuple[CorrelationRow, ...] = ()
    warnings: Tuple[str, ...] = ()


NO_CORRELATIONS_NOTE = "no correlations computable"


def _fmt(value: Optional[float]) -> str:
    return "NA" if value is None else f"{value:.6f}"


def _write_lines(path: Path, lines: Sequence[str]) -> None:
    path.write_text("".join(line + "\n" for line in lines))


def correlation_csv_lines(report: Report) -> List[str]:
    """CSV lines for the correlation table, with a marker when empty."""
    lines = ["scope,metric,n_speakers,pearson"]
    for row in report.correlations:
        lines.append(f"{row.scope},{row.metric},{row.n_speakers},{_fmt(row.pearson)}")
    if not any(row.pearson is not None for row in report.correlations):
        lines.append(f"# {NO_CORRELATIONS_NOTE}")
    return lines


def emit_report(report: Report, out_dir: Path | str, formats: Sequence[str] = ("csv", "json")) -> List[Path]:
    """Write scores, scatter and correlation tables; returns written paths.

    CSV output is scores.csv (one row per speaker), scatter.csv (one row
    per dysarthric speaker: perceptual plus one predicted column per
    metric) and correlations.csv.  JSON output is report.json carrying the
    same content.  All rows are sorted and floats carry 6 decimals.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: List[Path] = []
    no_correlations = not any(row.pearson is not None for row in report.correlations)

    if "csv" in formats:
        lines = ["speaker_id,cohort,perceptual," + ",".join(report.metrics)]
        for sid in sorted(report.cohorts):
            scores = report.speaker_scores.get(sid, {})
            cells = [sid, report.cohorts[sid], _fmt(report.perceptual.get(sid))]
            cells.extend(_fmt(scores.get(metric)) for metric in report.metrics)
            lines.append(",".join(cells))
        path = out / "scores.csv"
        _write_lines(path, lines)
        written.append(path)

        lines = [
            "speaker_id,perceptual,"
            + ",".join(f"pred_{metric}" for metric in report.metrics)
        ]
        for sid in sorted(report.perceptual):
            scores = report.speaker_scores.get(sid, {})
            cells = [sid, _fmt(report.perceptual[sid])]
            cells.extend(_fmt(scores.get(metric)) for metric in report.metrics)
            lines.append(",".join(cells))
        path = out / "scatter.csv"
        _write_lines(path, lines)
        written.append(path)

        path = out / "correlations.csv"
        _write_lines(path, correlation_csv_lines(report))
        written.append(path)

    if "json" in formats:
        payload = {
            "metrics": list(report.metrics),
            "speakers": {
                sid: {
                    "cohort": report.cohorts[sid],
                    "perceptual": _round(report.perceptual.get(sid)),
                    "scores": {
                        metric: _round(report.speaker_scores.get(sid, {}).get(metric))
                        for metric in report.metrics
                    },
                }
                for sid in sorted(report.cohorts)
            },
            "correlations": [
                {
                    "scope": row.scope,
                    "metric": row.metric,
                    "n_speakers": row.n_speakers,
                    "pearson": _round(row.pearson),
                }
                for row in report.correlations
            ],
            "warnings": list(report.warnings),
        }
        if no_correlations:
            payload["note"] = NO_CORRELATIONS_NOTE
        path = out / "report.json"
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        written.append(path)
    return written


def _round(value: Optional[float]) -> Optional[float]:
    return None if value is None else round(value, 6)


def emit_selection(
    result: SubsetResult, out_dir: Path | str, formats: Sequence[str] = ("csv", "json")
) -> List[Path]:
    """Persist a subset-selection result with its full cost decomposition."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: List[Path] = []
    if "csv" in formats:
        lines = [
            "words,cost,size_term,corr_term,effort_term,pearson",
            ",".join(
                [
                    " ".join(result.words),
                    f"{result.cost:.6f}",
                    f"{result.size_term:.6f}",
                    f"{result.corr_term:.6f}",
                    f"{result.effort_term:.6f}",
                    _fmt(result.pearson),
                ]
            ),
        ]
        path = out / "selection.csv"
        _write_lines(path, lines)
        written.append(path)
    if "json" in formats:
        payload = {
            "words": list(result.words),
            "cost": _round(result.cost),
            "size_term": _round(result.size_term),
            "corr_term": _round(result.corr_term),
            "effort_term": _round(result.effort_term),
            "pearson": _round(result.pearson),
        }
        path = out / "selection.json"
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        written.append(path)
    return written


def load_scores(path: Path | str) -> Dict[str, Dict[str, float]]:
    """Read scores.csv back into a speaker -> metric -> value mapping."""
    rows = Path(path).read_text().splitlines()
    if not rows:
        raise CorpusError(f"{Path(path).name}: empty file")
    header = rows[0].split(",")
    if header[:3] != ["speaker_id", "cohort", "perceptual"]:
        raise CorpusError(f"{Path(path).name}:1: unexpected header")
    metrics = header[3:]
    scores: Dict[str, Dict[str, float]] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        cells = row.split(",")
        if len(cells) != len(header):
            raise CorpusError(f"{Path(path).name}:{lineno}: ragged row")
        per_metric = {}
        for metric, cell in zip(metrics, cells[3:]):
            if cell != "NA":
                per_metric[metric] = float(cell)
        scores[cells[0]] = per_metric
    return scores
