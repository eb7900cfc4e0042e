"""Silverforge: sentence-pair data augmentation toolkit.

Samples candidate sentence pairs (random, BM25, semantic search, or
combined), soft-labels them with a pluggable pair scorer, matches the
resulting silver data to the gold score distribution, merges, and
evaluates; includes a seed-optimization harness and a synthetic
end-to-end lab.
"""

__version__ = "0.1.0"

from .augment import (
    SilverReport,
    build_cross_domain_silver,
    build_silver,
    generate_candidates,
    merge_gold_silver,
    silver_stats,
    silver_stats_table,
)
from .bm25 import Bm25Index, tokenize
from .data import (
    LabeledPair,
    PairDataset,
    SamplingConfig,
    Sentence,
    SentencePair,
    canonicalize,
    load_dataset,
    load_labeled_pairs,
    load_splits,
    save_labeled_pairs,
    unique_sentences,
)
from .distmatch import (
    DensityModel,
    RatioSpec,
    acceptance_probability,
    fit_kde,
    kde_filter,
    kl_divergence,
    ratio_filter,
    score_histogram,
)
from .errors import ContaminationError, DatasetError, ScorerProtocolError, SilverforgeError
from .metrics import (
    auc_at,
    f1_positive,
    jaccard_baseline,
    majority_baseline,
    spearman,
    threshold_search,
)
from .scorers import PairScorer, RemoteScorer, SentenceEmbedder, SyntheticOracle, remote_score
from .seedopt import SeedOptResult, SeedRunConfig, Trainable, early_stop_correlation, seed_optimize
from .semsearch import EmbeddingMatrix, cosine, load_embedding_cache, save_embedding_cache

__all__ = [
    "__version__",
    "Bm25Index",
    "ContaminationError",
    "DatasetError",
    "DensityModel",
    "EmbeddingMatrix",
    "LabeledPair",
    "PairDataset",
    "PairScorer",
    "RatioSpec",
    "RemoteScorer",
    "SamplingConfig",
    "ScorerProtocolError",
    "SeedOptResult",
    "SeedRunConfig",
    "Sentence",
    "SentenceEmbedder",
    "SentencePair",
    "SilverReport",
    "SilverforgeError",
    "SyntheticOracle",
    "Trainable",
    "acceptance_probability",
    "auc_at",
    "build_cross_domain_silver",
    "build_silver",
    "canonicalize",
    "cosine",
    "early_stop_correlation",
    "f1_positive",
    "fit_kde",
    "generate_candidates",
    "jaccard_baseline",
    "kde_filter",
    "kl_divergence",
    "load_dataset",
    "load_embedding_cache",
    "load_labeled_pairs",
    "load_splits",
    "majority_baseline",
    "merge_gold_silver",
    "ratio_filter",
    "remote_score",
    "save_embedding_cache",
    "save_labeled_pairs",
    "score_histogram",
    "seed_optimize",
    "silver_stats",
    "silver_stats_table",
    "spearman",
    "threshold_search",
    "tokenize",
    "unique_sentences",
]
