"""Command-line surface tying scoring, effort analysis and selection together.

Commands: score, effort, traverse, filter-candidates, select, correlate,
validate.  Every command exits 0 on success and prints a one-line JSON
object to stderr on failure.  A JSON config file can supply any flag;
explicit flags win over the config, which wins over built-in defaults.

All parallelism (per-speaker scoring, subset search) is internal and
result-invariant: output bytes do not depend on the worker count.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from multiprocessing import get_context
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .corpus import (
    Corpus,
    CorpusError,
    CorrelationRow,
    Report,
    correlation_csv_lines,
    emit_report,
    emit_selection,
    load_corpus,
)
from .feature_metrics import FeatureVector, i_os_speaker, i_os_word, normalize
from .phonetics import arpabet_to_vs, filter_candidates, load_lexicon, vowel_traversal
from .selection import (
    Alphas,
    UndefinedCorrelationError,
    optimize,
    pearson,
    scenario,
)
from .strops import from_word
from .text_metrics import (
    GroundTruth,
    aggregate_speaker,
    normalize_hypothesis,
    score_ld,
    score_sm,
    score_unk,
)
from .visible_speech import effort_histogram, word_effort

METRICS = ("os", "sm", "ld", "unk")

SCOPE_ALL = "all"


class CliError(ValueError):
    """Raised for command-level usage and data problems."""


# ---------------------------------------------------------------------------
# scoring pipeline

def _in_scope(utterance, scope: str) -> bool:
    if scope == SCOPE_ALL:
        return True
    kind, _, value = scope.partition(":")
    if kind == "block":
        return utterance.block == value
    return utterance.category == value


def _text_values(utterances, metrics: Sequence[str]) -> Dict[str, Dict[Tuple[str, int], float]]:
    """Per-utterance scores for the requested text metrics."""
    values: Dict[str, Dict[Tuple[str, int], float]] = {m: {} for m in metrics}
    if not values:
        return values
    for utterance in utterances:
        hyp = normalize_hypothesis(utterance.hypothesis)
        truth = GroundTruth(from_word(utterance.word))
        key = (utterance.word, utterance.repetition)
        for metric in values:
            if metric == "sm":
                score = score_sm(hyp, truth)
            elif metric == "ld":
                score = score_ld(hyp, truth)
            else:
                score = score_unk(hyp, truth)
            values[metric][key] = score.value
    return values


def _aggregate_text(
    values: Mapping[Tuple[str, int], float], utterances, scope: str
) -> Optional[float]:
    by_word: Dict[str, List[float]] = {}
    for utterance in utterances:
        if _in_scope(utterance, scope):
            key = (utterance.word, utterance.repetition)
            by_word.setdefault(utterance.word, []).append(values[key])
    if not by_word:
        return None
    return aggregate_speaker(by_word)


def _os_word_values(
    corpus: Corpus, speaker_id: str, scope: str, strict: bool
) -> Optional[Dict[str, float]]:
    """Per-word outlier scores for one speaker against the healthy pool.

    The reference pool for each word is every in-scope repetition by the
    other healthy speakers, so healthy speakers are never compared with
    themselves.  When strict, missing vectors or an empty reference pool
    are hard errors; otherwise the affected words are skipped.
    """
    params = corpus.normalization
    if params is None:
        if strict:
            raise CorpusError("metric os requires feature vectors; corpus has none")
        return None
    healthy = set(corpus.healthy_ids())
    mine: Dict[str, List[FeatureVector]] = {}
    for utterance in corpus.speaker_utterances(speaker_id):
        if not _in_scope(utterance, scope):
            continue
        if utterance.features is None:
            if strict:
                raise CorpusError(
                    "metric os requires feature vectors; none for "
                    f"{utterance.utterance_id}"
                )
            continue
        mine.setdefault(utterance.word, []).append(normalize(utterance.features, params))
    pools: Dict[str, List[FeatureVector]] = {}
    for utterance in corpus.utterances:
        if utterance.speaker == speaker_id or utterance.speaker not in healthy:
            continue
        if utterance.features is None or utterance.word not in mine:
            continue
        if not _in_scope(utterance, scope):
            continue
        pools.setdefault(utterance.word, []).append(normalize(utterance.features, params))
    values: Dict[str, float] = {}
    for word in sorted(mine):
        pool = pools.get(word)
        if not pool:
            if strict:
                raise CorpusError(f"no healthy reference utterances for word {word!r}")
            continue
        values[word] = i_os_word(mine[word], pool)
    return values or None


def _score_speaker_task(
    payload: Tuple[Corpus, str, Tuple[str, ...], Tuple[str, ...], bool]
) -> Tuple[str, Dict[str, Dict[str, Optional[float]]]]:
    corpus, speaker_id, metrics, scopes, strict_os = payload
    utterances = corpus.speaker_utterances(speaker_id)
    text_values = _text_values(utterances, tuple(m for m in metrics if m != "os"))
    result: Dict[str, Dict[str, Optional[float]]] = {}
    for scope in scopes:
        per_metric: Dict[str, Optional[float]] = {}
        for metric in metrics:
            if metric == "os":
                words = _os_word_values(
                    corpus, speaker_id, scope, strict_os and scope == SCOPE_ALL
                )
                per_metric[metric] = (
                    None
                    if words is None
                    else i_os_speaker([words[w] for w in sorted(words)])
                )
            else:
                per_metric[metric] = _aggregate_text(
                    text_values[metric], utterances, scope
                )
        result[scope] = per_metric
    return speaker_id, result


def build_report(
    corpus: Corpus,
    metrics: Sequence[str],
    workers: int = 1,
    allow_partial: bool = False,
) -> Report:
    """Score every speaker and summarize correlations per block and category.

    Each dysarthric speaker's per-scope score is correlated with the
    perceptual scores across speakers; scopes with fewer than 3 scored
    speakers (or a degenerate series) report no coefficient.  Scoring is
    parallel per speaker and byte-identical for any worker count.
    """
    requested = tuple(m for m in METRICS if m in metrics)
    if not requested or len(requested) != len(set(metrics)):
        raise ValueError(f"unknown metric in {sorted(metrics)!r}")
    dysarthric = corpus.dysarthric_ids()
    blocks = sorted({u.block for u in corpus.utterances})
    categories = [
        c for c in ("D", "L", "CC", "CW", "UW")
        if any(u.category == c for u in corpus.utterances)
    ]
    scopes = (
        [SCOPE_ALL]
        + [f"block:{b}" for b in blocks]
        + [f"category:{c}" for c in categories]
    )
    strict_os = "os" in requested and not allow_partial

    tasks = []
    for speaker_id in sorted(corpus.speakers):
        speaker_scopes = tuple(scopes) if speaker_id in dysarthric else (SCOPE_ALL,)
        tasks.append((corpus, speaker_id, requested, speaker_scopes, strict_os))
    if workers > 1 and len(tasks) > 1:
        context = get_context("spawn")
        with ProcessPoolExecutor(
            max_workers=min(workers, len(tasks)), mp_context=context
        ) as executor:
            scored = list(executor.map(_score_speaker_task, tasks))
    else:
        scored = [_score_speaker_task(task) for task in tasks]
    results = dict(scored)

    speaker_scores = {
        speaker_id: {
            metric: value
            for metric, value in scopes_result[SCOPE_ALL].items()
            if value is not None
        }
        for speaker_id, scopes_result in results.items()
    }

    rows = []
    for scope in scopes:
        for metric in requested:
            xs: List[float] = []
            ys: List[float] = []
            for speaker_id in dysarthric:
                value = results[speaker_id].get(scope, {}).get(metric)
                if value is not None:
                    xs.append(value)
                    ys.append(float(corpus.speakers[speaker_id].perceptual))
            coefficient = None
            if len(xs) >= 3:
                try:
                    coefficient = pearson(xs, ys)
                except UndefinedCorrelationError:
                    coefficient = None
            rows.append(
                CorrelationRow(
                    scope=scope,
                    metric=metric,
                    n_speakers=len(xs),
                    pearson=coefficient,
                )
            )

    return Report(
        metrics=requested,
        cohorts={sid: sp.cohort for sid, sp in corpus.speakers.items()},
        perceptual={
            sid: float(corpus.speakers[sid].perceptual) for sid in dysarthric
        },
        speaker_scores=speaker_scores,
        correlations=tuple(rows),
        warnings=corpus.warnings,
    )


def metric_word_scores(
    corpus: Corpus, speaker_id: str, metric: str
) -> Dict[str, float]:
    """Per-word scores for one speaker, for subset selection."""
    if metric == "os":
        return _os_word_values(corpus, speaker_id, SCOPE_ALL, strict=True) or {}
    utterances = corpus.speaker_utterances(speaker_id)
    values = _text_values(utterances, (metric,))[metric]
    by_word: Dict[str, List[float]] = {}
    for utterance in utterances:
        key = (utterance.word, utterance.repetition)
        by_word.setdefault(utterance.word, []).append(values[key])
    out: Dict[str, float] = {}
    for word, reps in by_word.items():
        total = 0.0
        for value in reps:
            total += value
        out[word] = total / len(reps)
    return out


# ---------------------------------------------------------------------------
# commands

def _fmt_opt(value: Optional[float]) -> str:
    return "NA" if value is None else f"{value:.6f}"


def _require(opts: Mapping[str, object], key: str) -> object:
    value = opts.get(key)
    if value in (None, ""):
        raise CliError(f"missing required option --{key.replace('_', '-')}")
    return value


def cmd_score(opts: Dict[str, object]) -> int:
    corpus = load_corpus(str(_require(opts, "corpus")))
    metric = str(opts["metric"])
    metrics = METRICS if metric == "all" else (metric,)
    report = build_report(
        corpus,
        metrics,
        workers=int(opts["workers"]),
        allow_partial=bool(opts["allow_partial"]),
    )
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    for path in emit_report(report, str(_require(opts, "out"))):
        print(f"wrote {path}")
    return 0


def _effort_rows(opts: Dict[str, object]):
    word = opts.get("word")
    lexicon_path = opts.get("lexicon")
    if not word and not lexicon_path:
        raise CliError("one of --word or --lexicon is required")
    lexicon = load_lexicon(lexicon_path)
    if word:
        entry = lexicon.get(str(word))
        if entry is None:
            raise CliError(f"word {word!r} not in lexicon")
        return [(str(word), entry)], True
    return sorted(lexicon.items()), False


def cmd_effort(opts: Dict[str, object]) -> int:
    rows, single = _effort_rows(opts)
    computed = []
    for word, entry in rows:
        sequence = arpabet_to_vs(entry)
        computed.append((word, word_effort(sequence), effort_histogram(sequence)))
    if not single:
        computed.sort(key=lambda row: (-row[1], row[0]))
    for word, effort, histogram in computed:
        line = f"{word} {effort}"
        if opts["histogram"]:
            line += " " + ",".join(f"{k}:{histogram[k]}" for k in sorted(histogram))
        print(line)
    return 0


def cmd_traverse(opts: Dict[str, object]) -> int:
    rows, single = _effort_rows(opts)
    computed = []
    for word, entry in rows:
        try:
            computed.append((word, vowel_traversal(entry)))
        except ValueError as exc:
            if single:
                raise CliError(str(exc)) from None
            computed.append((word, None))
    if not single:
        computed.sort(key=lambda row: (row[1] is None, -(row[1] or 0.0), row[0]))
    for word, value in computed:
        print(f"{word} {_fmt_opt(value)}")
    return 0


def cmd_filter_candidates(opts: Dict[str, object]) -> int:
    lexicon = load_lexicon(opts.get("lexicon"))
    survivors = filter_candidates(
        lexicon,
        min_syllables=int(opts["min_syllables"]),
        min_traversal=float(opts["min_traversal"]),
    )
    for word in survivors:
        print(word)
    return 0


def _parse_alphas(value: object) -> Alphas:
    if isinstance(value, str):
        parts = value.split(",")
    elif isinstance(value, (list, tuple)):
        parts = list(value)
    else:
        raise CliError(f"cannot parse alphas from {value!r}")
    if len(parts) != 3:
        raise CliError("expected three comma-separated weights, e.g. 1,1,1")
    try:
        return Alphas(*(float(p) for p in parts))
    except ValueError as exc:
        raise CliError(f"bad alphas {value!r}: {exc}") from None


def cmd_select(opts: Dict[str, object]) -> int:
    if opts.get("alphas") is not None:
        alphas = _parse_alphas(opts["alphas"])
    else:
        alphas = scenario(str(opts["preset"]))
    lexicon = load_lexicon(opts.get("candidates"))
    efforts = {
        word: word_effort(arpabet_to_vs(entry))
        for word, entry in sorted(lexicon.items())
    }

    metric_scores = None
    perceptual = None
    if alphas.a2 > 0:
        corpus_path = opts.get("corpus")
        if not corpus_path:
            raise CliError("correlation weight a2 > 0 requires --corpus")
        corpus = load_corpus(str(corpus_path))
        dysarthric = corpus.dysarthric_ids()
        perceptual = {
            sid: float(corpus.speakers[sid].perceptual) for sid in dysarthric
        }
        metric = str(opts["metric"])
        metric_scores = {
            sid: metric_word_scores(corpus, sid, metric) for sid in dysarthric
        }

    result = optimize(
        efforts,
        metric_scores=metric_scores,
        perceptual=perceptual,
        alphas=alphas,
        max_exhaustive_n=int(opts["max_exhaustive_n"]),
        workers=int(opts["workers"]),
        heuristic=bool(opts["heuristic"]),
        signed_correlation=bool(opts["signed_correlation"]),
    )
    print(f"words: {' '.join(result.words)}")
    print(f"cost: {result.cost:.6f}")
    print(f"size_term: {result.size_term:.6f}")
    print(f"corr_term: {result.corr_term:.6f}")
    print(f"effort_term: {result.effort_term:.6f}")
    print(f"pearson: {_fmt_opt(result.pearson)}")
    if opts.get("out"):
        for path in emit_selection(result, str(opts["out"])):
            print(f"wrote {path}")
    return 0


def cmd_correlate(opts: Dict[str, object]) -> int:
    corpus = load_corpus(str(_require(opts, "corpus")))
    metric = str(opts["metric"])
    metrics = METRICS if metric == "all" else (metric,)
    report = build_report(corpus, metrics, workers=int(opts["workers"]))
    for line in correlation_csv_lines(report)[1:]:
        print(line.lstrip("# "))
    if opts.get("out"):
        out = Path(str(opts["out"]))
        out.mkdir(parents=True, exist_ok=True)
        path = out / "correlations.csv"
        path.write_text("".join(l + "\n" for l in correlation_csv_lines(report)))
        print(f"wrote {path}")
    return 0


def cmd_validate(opts: Dict[str, object]) -> int:
    corpus = load_corpus(str(_require(opts, "corpus")))
    for warning in corpus.warnings:
        print(f"warning: {warning}")
    print(
        f"ok: {len(corpus.utterances)} utterances, "
        f"{len(corpus.speakers)} speakers, {len(corpus.lexicon)} lexicon words"
    )
    return 0


# ---------------------------------------------------------------------------
# parser and dispatch

_COMMON_DEFAULTS: Dict[str, object] = {"workers": os.cpu_count() or 1}

_DEFAULTS: Dict[str, Dict[str, object]] = {
    "score": {"corpus": None, "metric": "all", "out": None, "allow_partial": False},
    "effort": {"word": None, "lexicon": None, "histogram": False},
    "traverse": {"word": None, "lexicon": None},
    "filter-candidates": {
        "lexicon": None,
        "min_syllables": 5,
        "min_traversal": 2400.0,
    },
    "select": {
        "corpus": None,
        "candidates": None,
        "preset": "full",
        "alphas": None,
        "metric": "sm",
        "out": None,
        "heuristic": False,
        "max_exhaustive_n": 24,
        "signed_correlation": False,
    },
    "correlate": {"corpus": None, "metric": "all", "out": None},
    "validate": {"corpus": None},
}

_HANDLERS = {
    "score": cmd_score,
    "effort": cmd_effort,
    "traverse": cmd_traverse,
    "filter-candidates": cmd_filter_candidates,
    "select": cmd_select,
    "correlate": cmd_correlate,
    "validate": cmd_validate,
}


class _Parser(argparse.ArgumentParser):
    """Parser that reports usage errors as machine-parsable JSON."""

    def error(self, message: str) -> None:
        print(json.dumps({"error": message, "command": self.prog}), file=sys.stderr)
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="dysintel",
        description="Speaker-independent intelligibility assessment toolkit.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--workers",
        type=int,
        default=argparse.SUPPRESS,
        help="parallel worker processes (default: all cores)",
    )
    common.add_argument(
        "--config",
        default=argparse.SUPPRESS,
        help="JSON file supplying defaults for any flag of this command",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("score", parents=[common], help="score a corpus per speaker")
    p.add_argument("--corpus", default=argparse.SUPPRESS, help="corpus directory")
    p.add_argument(
        "--metric",
        choices=("os", "sm", "ld", "unk", "all"),
        default=argparse.SUPPRESS,
        help="metric to compute (default: all)",
    )
    p.add_argument("--out", default=argparse.SUPPRESS, help="output directory")
    p.add_argument(
        "--allow-partial",
        action="store_true",
        default=argparse.SUPPRESS,
        help="skip utterances without feature vectors instead of failing",
    )

    p = sub.add_parser("effort", parents=[common], help="articulatory word effort")
    p.add_argument("--word", default=argparse.SUPPRESS, help="single word to analyze")
    p.add_argument(
        "--lexicon",
        default=argparse.SUPPRESS,
        help="lexicon file (default: bundled candidates)",
    )
    p.add_argument(
        "--histogram",
        action="store_true",
        default=argparse.SUPPRESS,
        help="append the transition-effort histogram",
    )

    p = sub.add_parser("traverse", parents=[common], help="vowel-space traversal")
    p.add_argument("--word", default=argparse.SUPPRESS, help="single word to analyze")
    p.add_argument(
        "--lexicon",
        default=argparse.SUPPRESS,
        help="lexicon file (default: bundled candidates)",
    )

    p = sub.add_parser(
        "filter-candidates", parents=[common], help="filter a candidate lexicon"
    )
    p.add_argument(
        "--lexicon",
        default=argparse.SUPPRESS,
        help="lexicon file (default: bundled candidates)",
    )
    p.add_argument(
        "--min-syllables",
        type=int,
        default=argparse.SUPPRESS,
        help="minimum syllable count (default: 5)",
    )
    p.add_argument(
        "--min-traversal",
        type=float,
        default=argparse.SUPPRESS,
        help="minimum vowel-space traversal in Hz (default: 2400)",
    )

    p = sub.add_parser("select", parents=[common], help="optimal word-set selection")
    p.add_argument("--corpus", default=argparse.SUPPRESS, help="corpus directory")
    p.add_argument(
        "--candidates",
        default=argparse.SUPPRESS,
        help="candidate lexicon (default: bundled)",
    )
    p.add_argument(
        "--preset",
        choices=("dictionary-only", "correlation-only", "full"),
        default=argparse.SUPPRESS,
        help="cost weighting scenario (default: full)",
    )
    p.add_argument(
        "--alphas",
        default=argparse.SUPPRESS,
        help="explicit weights a1,a2,a3 (overrides --preset)",
    )
    p.add_argument(
        "--metric",
        choices=("os", "sm", "ld", "unk"),
        default=argparse.SUPPRESS,
        help="metric for the correlation term (default: sm)",
    )
    p.add_argument("--out", default=argparse.SUPPRESS, help="output directory")
    p.add_argument(
        "--heuristic",
        action="store_true",
        default=argparse.SUPPRESS,
        help="allow greedy search on pools above the exhaustive limit",
    )
    p.add_argument(
        "--max-exhaustive-n",
        type=int,
        default=argparse.SUPPRESS,
        help="largest pool searched exhaustively (default: 24)",
    )
    p.add_argument(
        "--signed-correlation",
        action="store_true",
        default=argparse.SUPPRESS,
        help="use the signed coefficient instead of its absolute value",
    )

    p = sub.add_parser("correlate", parents=[common], help="correlation summaries")
    p.add_argument("--corpus", default=argparse.SUPPRESS, help="corpus directory")
    p.add_argument(
        "--metric",
        choices=("os", "sm", "ld", "unk", "all"),
        default=argparse.SUPPRESS,
        help="metric to correlate (default: all)",
    )
    p.add_argument("--out", default=argparse.SUPPRESS, help="output directory")

    p = sub.add_parser("validate", parents=[common], help="load and validate a corpus")
    p.add_argument("--corpus", default=argparse.SUPPRESS, help="corpus directory")

    return parser


def _load_config(path: str, allowed: Sequence[str]) -> Dict[str, object]:
    try:
        with open(path) as handle:
            data = json.load(handle)
    except json.JSONDecodeError as exc:
        raise CliError(f"config {path!r}: {exc}") from None
    if not isinstance(data, dict):
        raise CliError(f"config {path!r} must be a JSON object")
    config = {str(key).replace("-", "_"): value for key, value in data.items()}
    unknown = sorted(set(config) - set(allowed))
    if unknown:
        raise CliError(f"config {path!r}: unknown keys {', '.join(unknown)}")
    return config


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    namespace = parser.parse_args(argv)
    explicit = vars(namespace)
    command = explicit.pop("command")

    opts: Dict[str, object] = dict(_COMMON_DEFAULTS)
    opts.update(_DEFAULTS[command])
    try:
        config_path = explicit.pop("config", None)
        if config_path:
            opts.update(_load_config(str(config_path), allowed=list(opts)))
        opts.update(explicit)
        return _HANDLERS[command](opts)
    except (ValueError, OSError) as exc:
        print(json.dumps({"error": str(exc), "command": command}), file=sys.stderr)
        return 1
    except KeyError as exc:
        message = str(exc.args[0]) if exc.args else str(exc)
        print(json.dumps({"error": message, "command": command}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
