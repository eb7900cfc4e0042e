"""Command-line surface for the augmentation pipeline.

Commands compose via files only: sample -> label -> filter -> merge ->
eval reproduces the full augmentation pipeline stage by stage, each
stage writing its output plus a run manifest for bit-for-bit replay.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from typing import Sequence

import numpy as np

from . import __version__
from .augment import build_silver, generate_candidates, merge_gold_silver
from .bm25 import Bm25Index
from .data import (
    PairDataset,
    SamplingConfig,
    load_candidate_pairs,
    load_labeled_pairs,
    load_splits,
    save_candidate_pairs,
    save_labeled_pairs,
    unique_sentences,
)
from .distmatch import RatioSpec, kde_filter, ratio_filter, score_histogram
from .errors import SilverforgeError
from .manifest import RunManifest, load_manifest, manifest_path_for, utc_now
from .metrics import auc_at, f1_positive, jaccard_baseline, majority_baseline, spearman, threshold_search
from .scorers import RemoteScorer, SyntheticOracle
from .seedopt import SeedRunConfig, seed_optimize
from .semsearch import EmbeddingMatrix, load_embedding_cache
from .simlab import (
    LabConfig,
    SentenceFeaturizer,
    ToyBiEncoderTask,
    build_in_domain_world,
    run_cross_domain_experiment,
    run_in_domain_experiment,
)

SCORER_URL_ENV = "SILVERFORGE_SCORER_URL"


class CliError(Exception):
    """Flag or input validation failure; exits with code 2."""


def _emit_error(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")


def _positive(kind, name):
    def parse(value):
        parsed = kind(value)
        if parsed < 1:
            raise argparse.ArgumentTypeError(f"{name} must be >= 1")
        return parsed

    return parse


def _int_list(value: str) -> list[int]:
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {value!r}") from exc


def _add_dataset_flags(p: argparse.ArgumentParser, *, dev_test: bool = True) -> None:
    p.add_argument("--gold", required=True, help="gold training split file")
    if dev_test:
        p.add_argument("--gold-dev", help="gold development split file")
        p.add_argument("--gold-test", help="gold test split file")
    p.add_argument("--format", choices=("jsonl", "tsv"), default="jsonl")
    p.add_argument("--task", choices=("regression", "classification"), default="regression")
    p.add_argument("--col-s1", type=int, default=0, help="TSV column of sentence 1")
    p.add_argument("--col-s2", type=int, default=1, help="TSV column of sentence 2")
    p.add_argument("--col-label", type=int, default=2, help="TSV column of the label")


def _add_scorer_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--scorer",
        default=None,
        help=f"'synthetic' or a service URL (default: ${SCORER_URL_ENV})",
    )
    p.add_argument("--oracle-dim", type=_positive(int, "--oracle-dim"), default=8)
    p.add_argument("--oracle-seed", type=int, default=0)
    p.add_argument("--oracle-noise", type=float, default=0.0)
    p.add_argument("--batch-size", type=_positive(int, "--batch-size"), default=64)
    p.add_argument("--threads", type=_positive(int, "--threads"), default=1)


def _load_gold(args) -> PairDataset:
    return load_splits(
        task=args.task,
        train=args.gold,
        dev=getattr(args, "gold_dev", None),
        test=getattr(args, "gold_test", None),
        fmt=args.format,
        col_s1=args.col_s1,
        col_s2=args.col_s2,
        col_label=args.col_label,
    )


def _resolve_scorer(args):
    spec = args.scorer or os.environ.get(SCORER_URL_ENV)
    if not spec:
        raise CliError(f"no scorer given: pass --scorer or set ${SCORER_URL_ENV}")
    if spec == "synthetic":
        if args.oracle_noise < 0:
            raise CliError("--oracle-noise must be >= 0")
        return SyntheticOracle(dim=args.oracle_dim, seed=args.oracle_seed, noise=args.oracle_noise)
    if spec.startswith(("http://", "https://")):
        return RemoteScorer(spec, batch_size=args.batch_size, parallelism=args.threads)
    raise CliError(f"unrecognized scorer {spec!r}: expected 'synthetic' or an http(s) URL")


def _new_manifest(args, argv: list[str], seed: int | None = None) -> RunManifest:
    options = {
        k: v for k, v in vars(args).items() if k not in ("func",) and not k.startswith("_")
    }
    return RunManifest(
        command=args.command,
        argv=list(argv),
        options=options,
        seed=seed,
        version=__version__,
        created_at=utc_now(),
    )


def _sweep_path(out: str, k: int) -> str:
    root, ext = os.path.splitext(out)
    return f"{root}.k{k}{ext or ''}"


# --- commands -------------------------------------------------------------

def cmd_sample(args, argv) -> int:
    if args.top_k < 1:
        raise CliError("--top-k must be >= 1")
    if args.rs_budget is not None and args.rs_budget < 1:
        raise CliError("--rs-budget must be >= 1")
    ks = args.sweep_k if args.sweep_k else [args.top_k]
    if any(k < 1 for k in ks):
        raise CliError("--sweep-k values must be >= 1")
    gold = _load_gold(args)
    manifest = _new_manifest(args, argv, seed=args.seed)
    for path in (args.gold, args.gold_dev, args.gold_test):
        if path:
            manifest.add_input(path)

    index = None
    matrix = None
    if args.strategy in ("bm25", "bm25_ss"):
        universe = unique_sentences(gold, splits=("train",))
        index = Bm25Index.build(universe, k1=args.k1, b=args.b)
    if args.strategy in ("ss", "bm25_ss"):
        if args.embeddings:
            matrix = load_embedding_cache(args.embeddings)
            manifest.add_input(args.embeddings)
        else:
            embedder = _resolve_scorer(args)
            if not hasattr(embedder, "embed_batch"):
                raise CliError("the configured scorer cannot embed sentences")
            universe = unique_sentences(gold, splits=("train",))
            matrix = EmbeddingMatrix.from_embedder(universe, embedder, batch_size=args.batch_size)

    for k in ks:
        config = SamplingConfig(
            strategy=args.strategy,
            top_k=k,
            rs_pair_budget=args.rs_budget,
            seed=args.seed,
            include_gold_pairs=args.include_gold_pairs,
        )
        candidates = generate_candidates(config, gold, index=index, matrix=matrix)
        out = _sweep_path(args.out, k) if args.sweep_k else args.out
        save_candidate_pairs(out, candidates)
        manifest.outputs.append(out)
    manifest.write(manifest_path_for(args.out))
    return 0


def cmd_label(args, argv) -> int:
    scorer = _resolve_scorer(args)
    if isinstance(scorer, RemoteScorer):
        health = scorer.health()
        if health.get("status") != "ok":
            raise CliError(f"scorer service not ready: {health}")
    candidates = load_candidate_pairs(args.candidates)
    silver, report = build_silver(
        candidates,
        scorer,
        filter_kind="none",
        batch_size=args.batch_size,
        strategy_label=args.strategy_label,
    )
    manifest = _new_manifest(args, argv)
    manifest.add_input(args.candidates)
    save_labeled_pairs(args.out, silver)
    manifest.outputs.append(args.out)
    report_path = args.report or args.out + ".report.json"
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    manifest.diagnostics.append(report_path)
    manifest.write(manifest_path_for(args.out))
    return 0


def cmd_filter(args, argv) -> int:
    if not 0.0 < args.threshold < 1.0:
        raise CliError("--threshold must be in (0, 1)")
    gold = _load_gold(args)
    interner_silver = load_labeled_pairs(args.silver, task=args.task, default_provenance="silver")
    manifest = _new_manifest(args, argv, seed=args.seed)
    manifest.add_input(args.gold)
    manifest.add_input(args.silver)
    if args.filter == "kde":
        kept = kde_filter([lp.score for lp in gold.train], interner_silver, seed=args.seed)
    else:
        spec = RatioSpec.from_gold_train(gold)
        kept = ratio_filter(spec, interner_silver, threshold=args.threshold, seed=args.seed)
    save_labeled_pairs(args.out, kept)
    manifest.outputs.append(args.out)
    manifest.write(manifest_path_for(args.out))
    return 0


def cmd_merge(args, argv) -> int:
    gold = _load_gold(args)
    silver = load_labeled_pairs(args.silver, task=args.task, default_provenance="silver")
    merged = merge_gold_silver(gold, silver, drop_gold_duplicates=not args.keep_gold_duplicates)
    manifest = _new_manifest(args, argv)
    for path in (args.gold, args.gold_dev, args.gold_test, args.silver):
        if path:
            manifest.add_input(path)
    save_labeled_pairs(args.out, merged.train)
    manifest.outputs.append(args.out)
    manifest.write(manifest_path_for(args.out))
    return 0


def _aligned_scores(pred_pairs, gold_pairs, what: str) -> list[float]:
    by_key = {lp.pair.text_key: lp.score for lp in pred_pairs}
    out = []
    for lp in gold_pairs:
        score = by_key.get(lp.pair.text_key)
        if score is None:
            raise CliError(f"{what} file is missing pair {lp.pair.a.text!r} / {lp.pair.b.text!r}")
        out.append(score)
    return out


def cmd_eval(args, argv) -> int:
    gold = load_labeled_pairs(
        args.gold, args.format, task=args.task,
        col_s1=args.col_s1, col_s2=args.col_s2, col_label=args.col_label,
    )
    gold_scores = [lp.score for lp in gold]
    metric = args.metric or ("spearman" if args.task == "regression" else "f1")

    if args.baseline == "jaccard":
        preds = [jaccard_baseline(lp.pair.a.text, lp.pair.b.text) for lp in gold]
    elif args.baseline == "majority":
        if not args.train:
            raise CliError("--baseline majority needs --train to count labels")
        train = load_labeled_pairs(args.train, args.format, task=args.task)
        label = majority_baseline([int(lp.score) for lp in train])
        preds = [float(label)] * len(gold)
    else:
        if not args.pred:
            raise CliError("pass --pred or --baseline")
        pred = load_labeled_pairs(args.pred, args.format, task="regression")
        preds = _aligned_scores(pred, gold, "--pred")

    threshold = None
    if metric == "spearman":
        value = spearman(preds, gold_scores)
    elif metric == "f1":
        gold_labels = [int(s) for s in gold_scores]
        if args.baseline == "majority":
            value = f1_positive([int(p) for p in preds], gold_labels)
        else:
            if args.threshold is not None:
                threshold = args.threshold
            elif args.dev_pred and args.dev_gold:
                dev_gold = load_labeled_pairs(args.dev_gold, args.format, task=args.task)
                dev_pred = load_labeled_pairs(args.dev_pred, args.format, task="regression")
                dev_scores = _aligned_scores(dev_pred, dev_gold, "--dev-pred")
                threshold, _ = threshold_search(dev_scores, [int(lp.score) for lp in dev_gold])
            else:
                raise CliError("F1 needs --threshold or --dev-pred/--dev-gold to tune one")
            value = f1_positive([int(p >= threshold) for p in preds], gold_labels)
    elif metric == "auc":
        if not 0.0 < args.fpr_cap <= 1.0:
            raise CliError("--fpr-cap must be in (0, 1]")
        value = auc_at(args.fpr_cap, preds, [int(s) for s in gold_scores])
    else:
        raise CliError(f"unknown metric {metric!r}")

    result = {"metric": metric, "value": value, "threshold": threshold}
    payload = json.dumps(result, sort_keys=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
        manifest = _new_manifest(args, argv)
        for path in (args.gold, args.pred, args.train, args.dev_pred, args.dev_gold):
            if path:
                manifest.add_input(path)
        manifest.outputs.append(args.out)
        manifest.write(manifest_path_for(args.out))
    else:
        sys.stdout.write(payload + "\n")
    return 0


def cmd_dist(args, argv) -> int:
    if args.bins < 1:
        raise CliError("--bins must be >= 1")
    sections = []
    inputs = []
    for name, path in (("gold", args.gold), ("silver", args.silver)):
        if not path:
            continue
        pairs = load_labeled_pairs(path, args.format, task="regression")
        rows = score_histogram([lp.score for lp in pairs], bins=args.bins)
        body = "\n".join(f"{mid:.4f}\t{density:.6f}" for mid, density in rows)
        sections.append(f"# {name}\n{body}")
        inputs.append(path)
    if not sections:
        raise CliError("pass --gold and/or --silver")
    table = "\n".join(sections) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(table)
        manifest = _new_manifest(args, argv)
        for path in inputs:
            manifest.add_input(path)
        manifest.outputs.append(args.out)
        manifest.write(manifest_path_for(args.out))
    else:
        sys.stdout.write(table)
    return 0


def cmd_simulate(args, argv) -> int:
    seeds = args.seeds if args.seeds else list(range(args.seed, args.seed + args.num_seeds))
    report: dict = {"mode": args.mode, "seeds": seeds}
    if args.mode in ("in-domain", "both"):
        per_seed = []
        for seed in seeds:
            run = run_in_domain_experiment(seed)
            per_seed.append(
                {
                    "seed": seed,
                    "scores": {k: run.scores[k] for k in sorted(run.scores)},
                    "silver": {
                        k: run.reports[k].to_dict(include_timings=False)
                        for k in sorted(run.reports)
                    },
                }
            )
        strategies = sorted(per_seed[0]["scores"])
        report["in_domain"] = {
            "per_seed": per_seed,
            "median_scores": {
                k: float(np.median([row["scores"][k] for row in per_seed])) for k in strategies
            },
        }
    if args.mode in ("cross-domain", "both"):
        per_seed = []
        for seed in seeds:
            run = run_cross_domain_experiment(seed)
            per_seed.append(
                {
                    "seed": seed,
                    "source_auc": run.source_auc,
                    "adapted_auc": run.adapted_auc,
                    "adaptation_pairs": run.adaptation_pairs,
                }
            )
        report["cross_domain"] = {
            "per_seed": per_seed,
            "median_source_auc": float(np.median([r["source_auc"] for r in per_seed])),
            "median_adapted_auc": float(np.median([r["adapted_auc"] for r in per_seed])),
        }
    payload = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload)
        manifest = _new_manifest(args, argv, seed=args.seed)
        manifest.outputs.append(args.out)
        manifest.write(manifest_path_for(args.out))
    else:
        sys.stdout.write(payload)
    return 0


def cmd_seedopt(args, argv) -> int:
    if not 0.0 < args.fraction <= 1.0:
        raise CliError("--fraction must be in (0, 1]")
    world = build_in_domain_world(args.world_seed)
    config = world.config
    featurizer = SentenceFeaturizer(dim=config.feature_dim, seed=args.world_seed)
    task = ToyBiEncoderTask(
        world.gold.train,
        world.gold.dev,
        featurizer,
        embed_dim=config.embed_dim,
        total_steps=args.steps,
        batch_size=config.batch_size,
        learning_rate=config.learning_rate,
    )
    run_config = SeedRunConfig(
        num_seeds=args.num_seeds,
        early_stop_fraction=args.fraction,
        seeds=tuple(args.seeds) if args.seeds else None,
        base_seed=args.seed,
    )
    result = seed_optimize(task, run_config)
    lines = [
        json.dumps(
            {
                "seed": run.seed,
                "partial_dev": run.partial_dev,
                "final_dev": run.final_dev,
                "winner": run.winner,
            },
            sort_keys=True,
        )
        for run in result.runs
    ]
    payload = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload)
        manifest = _new_manifest(args, argv, seed=args.seed)
        manifest.outputs.append(args.out)
        manifest.write(manifest_path_for(args.out))
    else:
        sys.stdout.write(payload)
    return 0


def cmd_pipeline(args, argv) -> int:
    """Chain sample -> label -> filter -> merge with one manifest."""
    if args.top_k < 1:
        raise CliError("--top-k must be >= 1")
    os.makedirs(args.out_dir, exist_ok=True)
    gold = _load_gold(args)
    scorer = _resolve_scorer(args)
    manifest = _new_manifest(args, argv, seed=args.seed)
    for path in (args.gold, args.gold_dev, args.gold_test):
        if path:
            manifest.add_input(path)

    index = None
    matrix = None
    if args.strategy in ("bm25", "bm25_ss"):
        universe = unique_sentences(gold, splits=("train",))
        index = Bm25Index.build(universe, k1=args.k1, b=args.b)
    if args.strategy in ("ss", "bm25_ss"):
        if not hasattr(scorer, "embed_batch"):
            raise CliError("the configured scorer cannot embed sentences")
        universe = unique_sentences(gold, splits=("train",))
        matrix = EmbeddingMatrix.from_embedder(universe, scorer, batch_size=args.batch_size)
    config = SamplingConfig(
        strategy=args.strategy,
        top_k=args.top_k,
        rs_pair_budget=args.rs_budget,
        seed=args.seed,
        include_gold_pairs=args.include_gold_pairs,
    )
    candidates = generate_candidates(config, gold, index=index, matrix=matrix)
    candidates_path = os.path.join(args.out_dir, "candidates.jsonl")
    save_candidate_pairs(candidates_path, candidates)
    manifest.outputs.append(candidates_path)

    filter_kind = args.filter
    if filter_kind == "auto":
        filter_kind = "none" if args.strategy in ("bm25", "ss", "bm25_ss") else (
            "kde" if args.task == "regression" else "ratio"
        )
    silver, report = build_silver(
        candidates,
        scorer,
        filter_kind=filter_kind,
        gold=gold,
        seed=args.seed,
        positive_threshold=args.threshold,
        batch_size=args.batch_size,
        strategy_label=args.strategy,
    )
    silver_path = os.path.join(args.out_dir, "silver.jsonl")
    save_labeled_pairs(silver_path, silver)
    manifest.outputs.append(silver_path)
    report_path = os.path.join(args.out_dir, "silver.report.json")
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    manifest.diagnostics.append(report_path)

    merged = merge_gold_silver(gold, silver, drop_gold_duplicates=not args.keep_gold_duplicates)
    merged_path = os.path.join(args.out_dir, "merged.jsonl")
    save_labeled_pairs(merged_path, merged.train)
    manifest.outputs.append(merged_path)
    manifest.write(os.path.join(args.out_dir, "pipeline.manifest.json"))
    return 0


def cmd_replay(args, argv) -> int:
    manifest = load_manifest(args.manifest)
    if manifest.command == "replay":
        raise CliError("refusing to replay a replay manifest")
    return main(manifest.argv)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="silverforge",
        description="Sentence-pair data augmentation: sample, label, filter, merge, evaluate.",
    )
    parser.add_argument("--version", action="version", version=f"silverforge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="generate candidate pairs from the gold training split")
    _add_dataset_flags(p)
    p.add_argument("--strategy", choices=("rs", "bm25", "ss", "bm25_ss", "kde"), required=True)
    p.add_argument("--top-k", type=int, default=5)
    p.add_argument("--sweep-k", type=_int_list, default=None, help="comma-separated k values")
    p.add_argument("--k1", type=float, default=1.5)
    p.add_argument("--b", type=float, default=0.75)
    p.add_argument("--rs-budget", type=int, default=None)
    p.add_argument("--include-gold-pairs", action="store_true")
    p.add_argument("--embeddings", help="embedding cache file for semantic search")
    _add_scorer_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("label", help="soft-label candidate pairs with a scorer")
    p.add_argument("--candidates", required=True)
    p.add_argument("--strategy-label", default=None, help="strategy tag stored on silver records")
    _add_scorer_flags(p)
    p.add_argument("--report", default=None, help="where to write the stage report JSON")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("filter", help="distribution-match a silver file to the gold training split")
    _add_dataset_flags(p, dev_test=False)
    p.add_argument("--silver", required=True)
    p.add_argument("--filter", choices=("kde", "ratio"), required=True)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("merge", help="merge silver pairs into the gold training split")
    _add_dataset_flags(p)
    p.add_argument("--silver", required=True)
    p.add_argument("--keep-gold-duplicates", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("eval", help="evaluate predictions against a gold file")
    _add_dataset_flags(p, dev_test=False)
    p.add_argument("--pred", help="predictions file (label = predicted score)")
    p.add_argument("--baseline", choices=("jaccard", "majority"))
    p.add_argument("--train", help="gold training file (majority baseline)")
    p.add_argument("--metric", choices=("spearman", "f1", "auc"))
    p.add_argument("--dev-pred", help="dev predictions for threshold tuning")
    p.add_argument("--dev-gold", help="dev gold labels for threshold tuning")
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--fpr-cap", type=float, default=0.05)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("dist", help="score histograms of gold and silver files")
    p.add_argument("--gold")
    p.add_argument("--silver")
    p.add_argument("--format", choices=("jsonl", "tsv"), default="jsonl")
    p.add_argument("--col-s1", type=int, default=0)
    p.add_argument("--col-s2", type=int, default=1)
    p.add_argument("--col-label", type=int, default=2)
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("simulate", help="synthetic end-to-end augmentation experiments")
    p.add_argument("--mode", choices=("in-domain", "cross-domain", "both"), default="both")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--num-seeds", type=_positive(int, "--num-seeds"), default=10)
    p.add_argument("--seeds", type=_int_list, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("seedopt", help="seed optimization of the toy bi-encoder")
    p.add_argument("--world-seed", type=int, default=0)
    p.add_argument("--num-seeds", type=_positive(int, "--num-seeds"), default=5)
    p.add_argument("--fraction", type=float, default=0.2)
    p.add_argument("--steps", type=_positive(int, "--steps"), default=200)
    p.add_argument("--seed", type=int, default=0, help="base training seed")
    p.add_argument("--seeds", type=_int_list, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_seedopt)

    p = sub.add_parser("pipeline", help="run sample, label, filter, and merge in one go")
    _add_dataset_flags(p)
    p.add_argument("--strategy", choices=("rs", "bm25", "ss", "bm25_ss", "kde"), required=True)
    p.add_argument("--top-k", type=int, default=5)
    p.add_argument("--k1", type=float, default=1.5)
    p.add_argument("--b", type=float, default=0.75)
    p.add_argument("--rs-budget", type=int, default=None)
    p.add_argument("--include-gold-pairs", action="store_true")
    p.add_argument(
        "--filter",
        choices=("auto", "none", "kde", "ratio"),
        default="auto",
        help="auto: none for retrieval strategies, else kde/ratio per task",
    )
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--keep-gold-duplicates", action="store_true")
    _add_scorer_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("replay", help="re-run a command from its manifest")
    p.add_argument("--manifest", required=True)
    p.set_defaults(func=cmd_replay)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(argv) if argv is not None else sys.argv[1:]
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, argv)
    except CliError as exc:
        _emit_error("validation", str(exc))
        return 2
    except SilverforgeError as exc:
        _emit_error(type(exc).__name__, str(exc))
        return 1
    except OSError as exc:
        _emit_error("io", str(exc))
        return 1


if __name__ == "__main__":
    sys.exit(main())
