"""Candidate generation, soft labeling, filtering, and merging.

The in-domain pipeline recombines sentences from the gold training split
into new candidate pairs, labels them with a pair scorer to form a silver
set, optionally distribution-matches the silver set to the gold one, and
merges the result into the training split. The cross-domain variant
labels a caller-supplied target-domain pair list instead.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bm25 import Bm25Index
from .data import (
    LabeledPair,
    PairDataset,
    SamplingConfig,
    SentencePair,
    num_canonical_pairs,
    pair_code,
    pair_from_code,
    unique_sentences,
)
from .distmatch import RatioSpec, kde_filter, ratio_filter
from .errors import ContaminationError, ScorerProtocolError
from .scorers import PairScorer
from .semsearch import EmbeddingMatrix

RS_BUDGET_FACTOR = 20  # default random pool size as a multiple of gold train

_DENSE_SAMPLING_LIMIT = 4_000_000


@dataclass
class SilverReport:
    """Per-strategy accounting of the silver pipeline stages."""

    strategy: str
    candidates: int
    labeled: int
    retained: int
    merged_train_size: int
    timings: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.retained <= self.labeled <= self.candidates:
            raise ValueError(
                "report must satisfy retained <= labeled <= candidates, got "
                f"{self.retained}/{self.labeled}/{self.candidates}"
            )

    def to_dict(self, include_timings: bool = True) -> dict:
        out = {
            "strategy": self.strategy,
            "candidates": self.candidates,
            "labeled": self.labeled,
            "retained": self.retained,
            "merged_train_size": self.merged_train_size,
        }
        if include_timings:
            out["timings"] = {k: self.timings[k] for k in sorted(self.timings)}
        return out


def _sample_pair_codes(
    n: int, budget: int, excluded: set[int], seed: int
) -> list[int]:
    """Uniform sample without replacement from the non-excluded pair codes."""
    total = num_canonical_pairs(n)
    available = total - len(excluded)
    budget = min(budget, available)
    if budget <= 0:
        return []
    rng = np.random.default_rng(seed)
    if total <= _DENSE_SAMPLING_LIMIT:
        codes = np.array([c for c in range(total) if c not in excluded], dtype=np.int64)
        chosen = rng.choice(codes, size=budget, replace=False)
        return sorted(int(c) for c in chosen)
    chosen_set: set[int] = set()
    out: list[int] = []
    while len(out) < budget:
        for c in rng.integers(0, total, size=max(64, 2 * (budget - len(out)))):
            c = int(c)
            if c in excluded or c in chosen_set:
                continue
            chosen_set.add(c)
            out.append(c)
            if len(out) == budget:
                break
    return sorted(out)


def generate_candidates(
    config: SamplingConfig,
    gold: PairDataset,
    index: Bm25Index | None = None,
    matrix: EmbeddingMatrix | None = None,
) -> list[SentencePair]:
    """Candidate pairs over the gold training sentences, per strategy.

    Random (and KDE-pool) sampling draws uniformly without replacement
    from the unlabeled pair universe up to the budget; the retrieval
    strategies take the union over all query sentences of their top-k
    hits. Pairs already labeled in the gold train split are excluded
    unless the config says otherwise. Output is canonical, deduplicated,
    and sorted by id pair.
    """
    universe = unique_sentences(gold, splits=("train",))
    n = len(universe)
    by_id = {s.id: s for s in universe}
    gold_keys = {lp.pair.key for lp in gold.train}
    exclude_gold = not config.include_gold_pairs
    # Dev/test pairs are never candidates: labeling them would leak the
    # evaluation splits into training.
    eval_keys = {lp.pair.key for lp in gold.dev} | {lp.pair.key for lp in gold.test}

    if config.strategy in ("rs", "kde"):
        budget = config.rs_pair_budget
        if budget is None:
            budget = RS_BUDGET_FACTOR * max(len(gold.train), 1)
        position = {s.id: i for i, s in enumerate(universe)}
        excluded: set[int] = set()
        barred = set(eval_keys)
        if exclude_gold:
            barred |= gold_keys
        for key_a, key_b in barred:
            ia = position.get(key_a)
            ib = position.get(key_b)
            if ia is not None and ib is not None:
                excluded.add(pair_code(min(ia, ib), max(ia, ib), n))
        codes = _sample_pair_codes(n, budget, excluded, config.seed)
        return [
            SentencePair(universe[i], universe[j])
            for i, j in (pair_from_code(c, n) for c in codes)
        ]

    keys: set[tuple[int, int]] = set()
    if config.strategy in ("bm25", "bm25_ss"):
        if index is None:
            raise ValueError(f"strategy {config.strategy!r} requires a BM25 index")
        for s in universe:
            for doc_id, _ in index.top_k(s, config.top_k):
                if doc_id not in by_id:
                    raise KeyError(f"index returned unknown sentence id {doc_id}")
                keys.add((min(s.id, doc_id), max(s.id, doc_id)))
    if config.strategy in ("ss", "bm25_ss"):
        if matrix is None:
            raise ValueError(f"strategy {config.strategy!r} requires an embedding matrix")
        for s in universe:
            for hit_id, _ in matrix.top_k(s.id, config.top_k):
                if hit_id not in by_id:
                    raise KeyError(f"matrix returned unknown sentence id {hit_id}")
                keys.add((min(s.id, hit_id), max(s.id, hit_id)))
    keys -= eval_keys
    if exclude_gold:
        keys -= gold_keys
    return [SentencePair(by_id[a], by_id[b]) for a, b in sorted(keys)]


def build_silver(
    candidates: Sequence[SentencePair],
    scorer: PairScorer,
    *,
    filter_kind: str = "none",
    gold: PairDataset | None = None,
    seed: int = 0,
    positive_threshold: float = 0.5,
    batch_size: int = 64,
    strategy_label: str | None = None,
) -> tuple[list[LabeledPair], SilverReport]:
    """Score every candidate, then filter per the task's matching rule.

    ``filter_kind`` is one of none (retrieval-sampled pairs are used as
    is), kde (regression distribution matching), or ratio (classification
    positive/negative matching); the latter two need the gold dataset.
    """
    if filter_kind not in ("none", "kde", "ratio"):
        raise ValueError(f"unknown filter {filter_kind!r}")
    if filter_kind != "none" and gold is None:
        raise ValueError(f"filter {filter_kind!r} requires the gold dataset")
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")

    timings: dict[str, float] = {}
    t0 = time.monotonic()
    scores: list[float] = []
    for batch_index, start in enumerate(range(0, len(candidates), batch_size)):
        chunk = candidates[start : start + batch_size]
        try:
            got = scorer.score_batch([(p.a.text, p.b.text) for p in chunk])
        except ScorerProtocolError as exc:
            raise ScorerProtocolError(f"labeling batch {batch_index}: {exc}") from exc
        if len(got) != len(chunk):
            raise ScorerProtocolError(
                f"labeling batch {batch_index}: {len(got)} scores for {len(chunk)} pairs"
            )
        for value in got:
            x = float(value)
            if not np.isfinite(x) or not 0.0 <= x <= 1.0:
                raise ScorerProtocolError(
                    f"labeling batch {batch_index}: score {value!r} out of range"
                )
            scores.append(x)
    labeled = [
        LabeledPair(pair, score, "silver", strategy_label)
        for pair, score in zip(candidates, scores)
    ]
    timings["label"] = time.monotonic() - t0

    t1 = time.monotonic()
    if not labeled or filter_kind == "none":
        retained = list(labeled)
    elif filter_kind == "kde":
        assert gold is not None
        retained = kde_filter([lp.score for lp in gold.train], labeled, seed=seed)
    else:
        assert gold is not None
        retained = ratio_filter(
            RatioSpec.from_gold_train(gold), labeled, threshold=positive_threshold, seed=seed
        )
    timings["filter"] = time.monotonic() - t1

    merged = len(retained) + (len(gold.train) if gold is not None else 0)
    report = SilverReport(
        strategy=strategy_label or "unknown",
        candidates=len(candidates),
        labeled=len(labeled),
        retained=len(retained),
        merged_train_size=merged,
        timings=timings,
    )
    return retained, report


def merge_gold_silver(
    gold: PairDataset,
    silver: Sequence[LabeledPair],
    drop_gold_duplicates: bool = True,
) -> PairDataset:
    """Union the silver pairs into the gold training split.

    Dev and test splits are untouched; a silver pair colliding with
    either is a hard error. Silver pairs duplicating a gold train pair
    are dropped by default (set ``drop_gold_duplicates=False`` to keep
    both labeled copies).
    """
    eval_keys = {
        lp.pair.text_key: name
        for name, pairs in (("dev", gold.dev), ("test", gold.test))
        for lp in pairs
    }
    train_keys = {lp.pair.text_key for lp in gold.train}
    kept: list[LabeledPair] = []
    for lp in silver:
        if lp.pair.a.id >= lp.pair.b.id:
            raise ValueError(f"silver pair not canonical: {lp.pair.key}")
        owner = eval_keys.get(lp.pair.text_key)
        if owner is not None:
            raise ContaminationError(
                f"silver pair {lp.pair.a.text!r} / {lp.pair.b.text!r} "
                f"collides with the {owner} split"
            )
        if drop_gold_duplicates and lp.pair.text_key in train_keys:
            continue
        kept.append(lp)
    return gold.with_train(tuple(gold.train) + tuple(kept))


def build_cross_domain_silver(
    source_gold: PairDataset,
    target_pairs: Sequence[SentencePair],
    scorer: PairScorer,
    *,
    target_eval: PairDataset | None = None,
    batch_size: int = 64,
) -> PairDataset:
    """Label a target-domain pair list with the source-fitted scorer.

    The returned dataset's training split is entirely silver; dev and
    test remain gold-labeled pass-throughs taken from ``target_eval``
    when provided, for evaluating the adapted model.
    """
    if not target_pairs:
        raise ValueError("no target pairs to adapt to")
    silver, _ = build_silver(
        target_pairs,
        scorer,
        filter_kind="none",
        batch_size=batch_size,
        strategy_label="cross_domain",
    )
    return PairDataset(
        task=source_gold.task,
        train=tuple(silver),
        dev=target_eval.dev if target_eval is not None else (),
        test=target_eval.test if target_eval is not None else (),
    )


_STATS_COLUMNS = ("strategy", "candidates", "labeled", "retained", "merged_train")


def silver_stats(report: SilverReport) -> str:
    """One fixed-width table row for a silver report."""
    return (
        f"{report.strategy:<12} {report.candidates:>10} {report.labeled:>10} "
        f"{report.retained:>10} {report.merged_train_size:>12}"
    )


def silver_stats_table(reports: Sequence[SilverReport]) -> str:
    """Header plus one row per report, sorted by strategy name."""
    header = (
        f"{_STATS_COLUMNS[0]:<12} {_STATS_COLUMNS[1]:>10} {_STATS_COLUMNS[2]:>10} "
        f"{_STATS_COLUMNS[3]:>10} {_STATS_COLUMNS[4]:>12}"
    )
    rows = [silver_stats(r) for r in sorted(reports, key=lambda r: r.strategy)]
    return "\n".join([header, *rows])
