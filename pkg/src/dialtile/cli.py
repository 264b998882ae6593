"""Command-line interface.

Subcommands: segment (corpus -> boundary files), evaluate (gold + predicted
boundary files -> metrics), baseline (random | og), experiment (full
config-driven run), sweep (grid over a config). Exit codes: 0 success,
2 configuration/usage error, 3 data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .corpus import CORPUS_FORMATS, NATIVE_JSONL, load_corpus
from .errors import ConfigError, CorpusError, DialtileError, MetricError
from .features import COREF_FILE, COREF_HEURISTIC, FeatureConfig
from .harness import (
    ExperimentConfig,
    OgTextTilingConfig,
    apply_overrides,
    config_from_dict,
    load_config_file,
    metrics_table,
    run_experiment,
    run_sweep,
)
from .metrics import (
    Segmentation,
    aggregate,
    evaluate_document,
    read_boundaries_jsonl,
)
from .tiling import METHODS, SIMILARITIES, TilingConfig


def _add_corpus_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--corpus", action="append", required=True,
                        help="corpus file or directory (repeatable)")
    parser.add_argument("--format", default=NATIVE_JSONL, choices=CORPUS_FORMATS,
                        help="corpus format (default: %(default)s)")
    parser.add_argument("--doc-filter", default=None,
                        help="regex; only documents whose id matches are processed")


def _add_tiling_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("tiling")
    group.add_argument("--method", default="bc", choices=METHODS)
    group.add_argument("--w", type=int, default=12, help="span target size in tokens")
    group.add_argument("--k", type=int, default=6, help="block size in spans")
    group.add_argument("--memory", type=int, default=20,
                       help="vocabulary memory in utterances (vi method)")
    group.add_argument("--smoothing-window", type=int, default=3)
    group.add_argument("--smoothing-rounds", type=int, default=1)
    group.add_argument("--threshold-sigma", type=float, default=0.5,
                       help="boundary cutoff mean - sigma*stddev; inf disables")
    group.add_argument("--similarity", default="jaccard", choices=SIMILARITIES)


def _add_feature_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("features")
    group.add_argument("--features", default="",
                       help="comma set from {sd,si,q,co}, e.g. 'sd,q'")
    group.add_argument("--boost", type=float, default=1.5,
                       help="speaker-introduction boost factor")
    group.add_argument("--coref-source", default=COREF_HEURISTIC,
                       help="'heuristic' or 'file:<chains.jsonl>'")
    group.add_argument("--coref-scale", type=float, default=0.5)


def _add_preprocess_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("preprocessing")
    group.add_argument("--stemming", default="off", choices=("on", "off"))
    group.add_argument("--stoplist", default=None, help="stop-word list override file")


def _add_eval_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("evaluation")
    group.add_argument("--fk", default="1,2",
                       help="comma list of fk tolerances (default: %(default)s)")
    group.add_argument("--beta", type=float, default=0.5,
                       help="precision weight in fk (beta < 1 favours precision)")
    group.add_argument("--pk-window", type=int, default=None,
                       help="fixed pk window (default: per-document)")


def _parse_fk(raw: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in raw.split(",") if part.strip())
    except ValueError as exc:
        raise ConfigError(f"bad --fk value {raw!r}: {exc}") from exc
    if not values or any(v < 0 for v in values):
        raise ConfigError(f"bad --fk value {raw!r}: tolerances must be >= 0")
    return values


def _feature_config(args) -> FeatureConfig:
    source = args.coref_source
    coref_file = None
    if source.startswith("file:"):
        source, coref_file = COREF_FILE, source.split(":", 1)[1]
    elif source != COREF_HEURISTIC:
        raise ConfigError(f"bad --coref-source {source!r}")
    try:
        return FeatureConfig.from_flags(
            args.features,
            boost_factor=args.boost,
            coref_source=source,
            coref_file=coref_file,
            coref_scale=args.coref_scale,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _experiment_config(args, segmenter: str) -> ExperimentConfig:
    try:
        tiling = TilingConfig(
            w=args.w,
            k=args.k,
            memory=args.memory,
            smoothing_window=args.smoothing_window,
            smoothing_rounds=args.smoothing_rounds,
            threshold_sigma=args.threshold_sigma,
            method=args.method,
            similarity=args.similarity,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return ExperimentConfig(
        corpus=tuple(args.corpus),
        corpus_format=args.format,
        segmenter=segmenter,
        tiling=tiling,
        features=_feature_config(args),
        stemming=args.stemming == "on",
        stoplist=args.stoplist,
        fk_tolerances=_parse_fk(args.fk),
        beta=args.beta,
        pk_window=args.pk_window,
        seed=args.seed,
        best_of=args.best_of,
        doc_filter=args.doc_filter,
        jobs=args.jobs,
    )


def _cmd_segment(args) -> int:
    config = _experiment_config(args, segmenter=args.method)
    result = run_experiment(config, out_dir=args.out)
    print(f"segmented {len(result.outcomes)} documents -> {args.out}")
    return 0


def _cmd_evaluate(args) -> int:
    if (args.gold is None) == (args.gold_corpus is None):
        raise ConfigError("provide exactly one of --gold or --gold-corpus")
    predictions = read_boundaries_jsonl(args.pred)
    if args.gold is not None:
        golds = read_boundaries_jsonl(args.gold)
    else:
        golds = {}
        for transcript in load_corpus(args.gold_corpus, args.format):
            golds[transcript.doc_id] = Segmentation.make(
                transcript.n, transcript.gold_boundaries
            )
    missing = sorted(set(predictions) - set(golds))
    if missing:
        raise CorpusError(f"predictions without gold boundaries: {missing[:5]}")
    absent = sorted(set(golds) - set(predictions))
    if absent:
        raise CorpusError(f"gold documents without predictions: {absent[:5]}")

    fk_tolerances = _parse_fk(args.fk)
    reports = []
    for doc_id in sorted(golds):
        if golds[doc_id].n != predictions[doc_id].n:
            raise CorpusError(
                f"{doc_id}: gold n={golds[doc_id].n} != predicted n={predictions[doc_id].n}"
            )
        reports.append(
            evaluate_document(
                golds[doc_id],
                predictions[doc_id],
                fk_tolerances=fk_tolerances,
                beta=args.beta,
                pk_window=args.pk_window,
                doc_id=doc_id,
            )
        )
    corpus_report = aggregate(reports)
    tsv, pretty = metrics_table(reports, corpus_report, fk_tolerances)
    if args.out:
        Path(args.out).write_text(tsv, encoding="utf-8")
    print(pretty, end="")
    return 0


def _cmd_baseline(args) -> int:
    segmenter = "random" if args.kind == "random" else "og-texttiling"
    og = OgTextTilingConfig(
        w=args.og_w,
        k=args.og_k,
        smoothing_window=args.smoothing_window,
        smoothing_rounds=args.smoothing_rounds,
        threshold_sigma=args.threshold_sigma,
    )
    config = replace(_experiment_config(args, segmenter=segmenter), og=og)
    result = run_experiment(config, out_dir=args.out)
    _, pretty = metrics_table(result.reports, result.corpus_report, config.fk_tolerances)
    print(pretty, end="")
    return 0


def _cmd_experiment(args) -> int:
    data = load_config_file(args.config)
    if args.set:
        data = apply_overrides(data, args.set)
    config = config_from_dict(data)
    result = run_experiment(config, out_dir=args.out)
    _, pretty = metrics_table(result.reports, result.corpus_report, config.fk_tolerances)
    print(pretty, end="")
    return 0


def _cmd_sweep(args) -> int:
    data = load_config_file(args.config)
    if args.set:
        data = apply_overrides(data, args.set)
    grid = {}
    for item in args.grid:
        if "=" not in item:
            raise ConfigError(f"bad --grid {item!r}: expected dotted.key=v1,v2,...")
        key, raw = item.split("=", 1)
        values = []
        for part in raw.split(","):
            try:
                values.append(json.loads(part))
            except json.JSONDecodeError:
                values.append(part)
        grid[key] = values
    results = run_sweep(data, grid, args.out)
    print(f"swept {len(results)} configurations -> {args.out}/sweep.tsv")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dialtile",
        description="Topic segmentation of dialogue transcripts and segmentation scoring.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_segment = sub.add_parser("segment", help="segment a corpus into boundary files")
    _add_corpus_args(p_segment)
    _add_tiling_args(p_segment)
    _add_feature_args(p_segment)
    _add_preprocess_args(p_segment)
    _add_eval_args(p_segment)
    p_segment.add_argument("--out", required=True, help="output directory")
    p_segment.add_argument("--seed", type=int, default=0)
    p_segment.add_argument("--best-of", type=int, default=1)
    p_segment.add_argument("--jobs", type=int, default=1)
    p_segment.set_defaults(func=_cmd_segment)

    p_eval = sub.add_parser("evaluate", help="score predicted boundaries against gold")
    p_eval.add_argument("--gold", default=None, help="gold boundary JSONL file")
    p_eval.add_argument("--gold-corpus", default=None,
                        help="corpus path; gold boundaries are derived from it")
    p_eval.add_argument("--format", default=NATIVE_JSONL, choices=CORPUS_FORMATS)
    p_eval.add_argument("--pred", required=True, help="predicted boundary JSONL file")
    p_eval.add_argument("--out", default=None, help="also write the table as TSV")
    _add_eval_args(p_eval)
    p_eval.set_defaults(func=_cmd_evaluate)

    p_base = sub.add_parser("baseline", help="run a baseline segmenter and evaluate it")
    p_base.add_argument("kind", choices=("random", "og"))
    _add_corpus_args(p_base)
    _add_tiling_args(p_base)
    _add_feature_args(p_base)
    _add_preprocess_args(p_base)
    _add_eval_args(p_base)
    p_base.add_argument("--og-w", type=int, default=20, help="og token-span size")
    p_base.add_argument("--og-k", type=int, default=10, help="og block size")
    p_base.add_argument("--out", required=True)
    p_base.add_argument("--seed", type=int, default=0)
    p_base.add_argument("--best-of", type=int, default=1,
                        help="random baseline: keep the best of N seeded iterations")
    p_base.add_argument("--jobs", type=int, default=1)
    p_base.set_defaults(func=_cmd_baseline)

    p_exp = sub.add_parser("experiment", help="run a config-driven experiment")
    p_exp.add_argument("--config", required=True, help="JSON or TOML config file")
    p_exp.add_argument("--set", action="append", default=[],
                       help="override, e.g. --set tiling.k=8 (repeatable)")
    p_exp.add_argument("--out", required=True)
    p_exp.set_defaults(func=_cmd_experiment)

    p_sweep = sub.add_parser("sweep", help="grid-run a config over parameter values")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--set", action="append", default=[])
    p_sweep.add_argument("--grid", action="append", required=True,
                         help="dotted.key=v1,v2,... (repeatable)")
    p_sweep.add_argument("--out", required=True)
    p_sweep.set_defaults(func=_cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (CorpusError, MetricError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except DialtileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
