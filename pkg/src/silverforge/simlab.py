"""Synthetic end-to-end laboratory for the augmentation pipeline.

The lab builds topic-structured sentence corpora whose ground-truth pair
similarity is defined by the synthetic oracle: each topic carries an
anchor token, anchor tokens are chosen so their latent vectors are
mutually anti-correlated, and sentences mix their anchor with topic words
and shared filler words. Random cross-topic pairs therefore score low,
same-topic pairs score high, and bridge sentences mixing two anchors fill
the middle of the scale, giving desk-scale analogues of real sentence
pair data.

On top of the worlds sit a trainable toy bi-encoder (a linear map from
frozen random sentence features to an embedding space, fit by gradient
steps on the squared error of cosine vs. label) and experiment drivers
for the in-domain and cross-domain augmentation comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .augment import (
    SilverReport,
    build_cross_domain_silver,
    build_silver,
    generate_candidates,
    merge_gold_silver,
)
from .bm25 import Bm25Index, tokenize
from .data import (
    LabeledPair,
    PairDataset,
    SamplingConfig,
    Sentence,
    SentenceInterner,
    SentencePair,
    normalize_text,
    unique_sentences,
)
from .metrics import auc_at, spearman
from .scorers import SyntheticOracle, stable_seed, token_unit_vector
from .semsearch import EmbeddingMatrix


# --- frozen sentence features and the toy bi-encoder ---------------------

@dataclass
class SentenceFeaturizer:
    """Frozen random sentence features from seeded token hashing.

    Independent of the oracle's latent space (different salt and seed),
    so the toy bi-encoder has to learn the mapping rather than inherit it.
    """

    dim: int = 64
    seed: int = 0
    _cache: dict[str, np.ndarray] = field(default_factory=dict, repr=False)

    def features(self, text: str) -> np.ndarray:
        key = normalize_text(text)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        tokens = tokenize(key) or [""]
        v = np.zeros(self.dim)
        for token in tokens:
            v += token_unit_vector(token, self.dim, self.seed, salt="feature")
        norm = np.linalg.norm(v)
        if norm == 0.0:
            v = np.zeros(self.dim)
            v[0] = 1.0
        else:
            v = v / norm
        self._cache[key] = v
        return v

    def matrix(self, texts: Sequence[str]) -> np.ndarray:
        return np.stack([self.features(t) for t in texts])


@dataclass
class TrainState:
    weights: np.ndarray
    rng: np.random.Generator
    steps_done: int = 0


def _pair_cosines(weights: np.ndarray, feats_a: np.ndarray, feats_b: np.ndarray) -> np.ndarray:
    u = feats_a @ weights.T
    v = feats_b @ weights.T
    nu = np.linalg.norm(u, axis=1) + 1e-12
    nv = np.linalg.norm(v, axis=1) + 1e-12
    return np.sum(u * v, axis=1) / (nu * nv)


class ToyBiEncoderTask:
    """Trainable bi-encoder: a linear map over frozen sentence features.

    One training step samples a mini-batch of labeled pairs (the full
    split when the batch size is at least the split size) and takes one
    gradient step on mean squared error between embedding cosine and the
    pair label mapped onto the cosine range, 2 * label - 1. Development
    evaluation is Spearman correlation of predicted cosines against dev
    labels.
    """

    def __init__(
        self,
        train_pairs: Sequence[LabeledPair],
        dev_pairs: Sequence[LabeledPair],
        featurizer: SentenceFeaturizer,
        embed_dim: int = 8,
        total_steps: int = 300,
        batch_size: int = 16,
        learning_rate: float = 0.5,
    ):
        if not train_pairs:
            raise ValueError("training split is empty")
        if total_steps < 1:
            raise ValueError("total_steps must be >= 1")
        self.featurizer = featurizer
        self.embed_dim = embed_dim
        self.total_steps = total_steps
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self._train_a = featurizer.matrix([lp.pair.a.text for lp in train_pairs])
        self._train_b = featurizer.matrix([lp.pair.b.text for lp in train_pairs])
        self._train_y = 2.0 * np.asarray([lp.score for lp in train_pairs]) - 1.0
        self._dev_a = featurizer.matrix([lp.pair.a.text for lp in dev_pairs])
        self._dev_b = featurizer.matrix([lp.pair.b.text for lp in dev_pairs])
        self._dev_y = np.asarray([lp.score for lp in dev_pairs])

    def init(self, seed: int) -> TrainState:
        rng = np.random.default_rng(stable_seed(seed, "toy-init"))
        weights = rng.normal(0.0, 1.0 / np.sqrt(self.featurizer.dim), (self.embed_dim, self.featurizer.dim))
        return TrainState(weights=weights, rng=np.random.default_rng(stable_seed(seed, "toy-batches")))

    def step(self, state: TrainState) -> TrainState:
        n = len(self._train_y)
        take = min(self.batch_size, n)
        idx = state.rng.choice(n, size=take, replace=False)
        fa, fb, y = self._train_a[idx], self._train_b[idx], self._train_y[idx]
        w = state.weights
        u = fa @ w.T
        v = fb @ w.T
        nu = np.linalg.norm(u, axis=1) + 1e-12
        nv = np.linalg.norm(v, axis=1) + 1e-12
        c = np.sum(u * v, axis=1) / (nu * nv)
        r = 2.0 * (c - y) / take
        du = r[:, None] * (v / (nu * nv)[:, None] - c[:, None] * u / (nu * nu)[:, None])
        dv = r[:, None] * (u / (nu * nv)[:, None] - c[:, None] * v / (nv * nv)[:, None])
        grad = du.T @ fa + dv.T @ fb
        return TrainState(
            weights=w - self.learning_rate * grad,
            rng=state.rng,
            steps_done=state.steps_done + 1,
        )

    def eval_dev(self, state: TrainState) -> float:
        if len(self._dev_y) < 2:
            return 0.0
        preds = _pair_cosines(state.weights, self._dev_a, self._dev_b)
        try:
            return spearman(preds, self._dev_y)
        except ValueError:
            return -1.0

    def train(self, seed: int) -> TrainState:
        state = self.init(seed)
        for _ in range(self.total_steps):
            state = self.step(state)
        return state

    def predict(self, state: TrainState, pairs: Sequence[SentencePair]) -> np.ndarray:
        fa = self.featurizer.matrix([p.a.text for p in pairs])
        fb = self.featurizer.matrix([p.b.text for p in pairs])
        return _pair_cosines(state.weights, fa, fb)

    def embedder(self, state: TrainState):
        """A SentenceEmbedder view of the trained model."""
        return _TrainedEmbedder(self.featurizer, state.weights)


@dataclass
class _TrainedEmbedder:
    featurizer: SentenceFeaturizer
    weights: np.ndarray

    def embed_batch(self, texts: Sequence[str]) -> np.ndarray:
        return self.featurizer.matrix(texts) @ self.weights.T


# --- synthetic worlds -----------------------------------------------------

@dataclass(frozen=True)
class LabConfig:
    topics: int = 3
    sentences_per_topic: int = 50
    bridge_sentences: int = 4
    topic_vocab_size: int = 12
    junk_vocab_size: int = 60
    anchor_repeats: int = 8
    topic_words_range: tuple[int, int] = (1, 2)
    junk_words_range: tuple[int, int] = (1, 2)
    anchor_window: tuple[float, float] = (-0.55, -0.45)
    topic_beta_window: tuple[float, float] = (0.4, 0.8)
    foreign_anchor_max: float = -0.05
    junk_anchor_max: float = 0.15
    anchor_pool: int = 4000
    oracle_dim: int = 3
    oracle_noise: float = 0.01
    gold_train_pairs: int = 30
    gold_dev_pairs: int = 40
    gold_test_pairs: int = 80
    gold_similar_fraction: float = 0.80
    gold_bridge_share: float = 0.15
    feature_dim: int = 256
    embed_dim: int = 32
    train_steps: int = 1200
    batch_size: int = 1_000_000
    learning_rate: float = 2.0
    top_k: int = 8
    rs_pair_budget: int | None = 600


def find_anchor_tokens(
    count: int,
    dim: int,
    seed: int,
    prefix: str = "anchor",
    window: tuple[float, float] = (-0.55, -0.45),
    pool: int = 4000,
) -> list[str]:
    """Tokens whose oracle latents are mutually anti-correlated.

    Deterministic greedy search over a candidate pool: every pair of
    chosen tokens must have latent cosine inside ``window``. Three unit
    vectors cannot all be below -0.5 pairwise, so the window sits just
    inside that geometric limit; random cross-topic sentence pairs then
    land near similarity (1 - 0.5) / 2 = 0.25.
    """
    lo, hi = window
    tokens = [f"{prefix}{i:04d}" for i in range(pool)]
    vectors = [token_unit_vector(t, dim, seed) for t in tokens]
    for start in range(pool):
        chosen = [start]
        for idx in range(pool):
            if idx == start:
                continue
            if all(lo <= float(vectors[idx] @ vectors[c]) <= hi for c in chosen):
                chosen.append(idx)
                if len(chosen) == count:
                    return [tokens[i] for i in chosen]
    raise RuntimeError(
        f"no {count} mutually anti-correlated anchors in a pool of {pool}; "
        "widen the window or enlarge the pool"
    )


def _find_topic_vocab(
    config: LabConfig, seed: int, prefix: str, anchor_latents: Sequence[np.ndarray]
) -> list[list[str]]:
    """Per-topic word lists aligned with their anchor, repelled by the rest.

    Alignment keeps same-topic scores high and spread (word choice moves
    the latent along the anchor by varying amounts); the foreign-anchor
    cap stops topic words of one topic from pulling cross-topic pairs up.
    """
    lo, hi = config.topic_beta_window
    vocab: list[list[str]] = []
    for t in range(config.topics):
        own = anchor_latents[t]
        others = [anchor_latents[o] for o in range(config.topics) if o != t]
        words: list[str] = []
        i = 0
        while len(words) < config.topic_vocab_size:
            if i >= 200_000:
                raise RuntimeError(f"topic vocab search exhausted for topic {t}")
            token = f"{prefix}t{t}w{i:05d}"
            i += 1
            v = token_unit_vector(token, config.oracle_dim, seed)
            if lo <= float(v @ own) <= hi and all(
                float(v @ o) <= config.foreign_anchor_max for o in others
            ):
                words.append(token)
        vocab.append(words)
    return vocab


def _find_junk_vocab(
    config: LabConfig, seed: int, prefix: str, anchor_latents: Sequence[np.ndarray]
) -> list[str]:
    """Filler words nearly orthogonal to every anchor.

    Shared fillers give BM25 occasional cross-topic hits without moving
    oracle similarities much. Some anchor triples leave only a tiny
    mutually-orthogonal region, so the cap is relaxed in stages until the
    vocabulary fills.
    """
    for slack in (0.0, 0.05, 0.1, 0.15):
        cap = config.junk_anchor_max + slack
        junk: list[str] = []
        i = 0
        while len(junk) < config.junk_vocab_size and i < 100_000:
            token = f"{prefix}junk{i:05d}"
            i += 1
            v = token_unit_vector(token, config.oracle_dim, seed)
            if all(abs(float(v @ a)) <= cap for a in anchor_latents):
                junk.append(token)
        if len(junk) == config.junk_vocab_size:
            return junk
    raise RuntimeError("junk vocab search exhausted")


@dataclass
class LabWorld:
    seed: int
    config: LabConfig
    corpus: list[Sentence]
    topic_of: dict[int, int]
    bridges: set[int]
    gold: PairDataset
    truth: SyntheticOracle
    labeler: SyntheticOracle


def _make_sentences(
    config: LabConfig,
    seed: int,
    prefix: str,
    anchors: Sequence[str],
    oracle_seed: int,
    interner: SentenceInterner,
) -> tuple[list[Sentence], dict[int, int], set[int]]:
    rng = np.random.default_rng(stable_seed(seed, prefix, "corpus"))
    anchor_latents = [token_unit_vector(a, config.oracle_dim, oracle_seed) for a in anchors]
    topic_vocab = _find_topic_vocab(config, oracle_seed, prefix, anchor_latents)
    junk_vocab = _find_junk_vocab(config, oracle_seed, prefix, anchor_latents)
    seen_texts: set[str] = set()
    sentences: list[Sentence] = []
    topic_of: dict[int, int] = {}
    bridges: set[int] = set()

    def compose(anchor_tokens: list[str], topics: Sequence[int]) -> str:
        for _ in range(64):
            words = list(anchor_tokens)
            for t in topics:
                n_tw = int(rng.integers(config.topic_words_range[0], config.topic_words_range[1] + 1))
                picks = rng.choice(config.topic_vocab_size, size=min(n_tw, config.topic_vocab_size), replace=False)
                words.extend(topic_vocab[t][int(i)] for i in picks)
            n_j = int(rng.integers(config.junk_words_range[0], config.junk_words_range[1] + 1))
            if n_j:
                picks = rng.choice(config.junk_vocab_size, size=n_j, replace=False)
                words.extend(junk_vocab[int(i)] for i in picks)
            rng.shuffle(words)
            text = " ".join(words)
            if text not in seen_texts:
                seen_texts.add(text)
                return text
        raise RuntimeError("could not generate a unique sentence; enlarge the vocab")

    for t in range(config.topics):
        for _ in range(config.sentences_per_topic):
            text = compose([anchors[t]] * config.anchor_repeats, [t])
            s = interner.intern(text)
            sentences.append(s)
            topic_of[s.id] = t
    for k in range(config.bridge_sentences):
        t1 = k % config.topics
        t2 = (k + 1) % config.topics
        half = config.anchor_repeats // 2
        anchor_tokens = [anchors[t1]] * half + [anchors[t2]] * (config.anchor_repeats - half)
        text = compose(anchor_tokens, [t1, t2])
        s = interner.intern(text)
        sentences.append(s)
        topic_of[s.id] = t1
        bridges.add(s.id)
    return sentences, topic_of, bridges


def _sample_gold_pairs(
    config: LabConfig,
    seed: int,
    sentences: Sequence[Sentence],
    topic_of: dict[int, int],
    bridges: set[int],
    label_fn,
    task: str,
) -> PairDataset:
    """Gold pairs biased toward same-topic pairs, as annotated corpora are.

    A configurable share of the same-topic pairs involves a bridge
    sentence, seeding the middle of the similarity scale; without them
    the gold score distribution collapses into two tight modes.
    """
    rng = np.random.default_rng(stable_seed(seed, "gold"))

    chosen: dict[tuple[int, int], SentencePair] = {}

    def add_pair(a: Sentence, b: Sentence) -> bool:
        if a.id == b.id:
            return False
        key = (min(a.id, b.id), max(a.id, b.id))
        if key in chosen:
            return False
        first, second = (a, b) if a.id < b.id else (b, a)
        chosen[key] = SentencePair(first, second)
        return True

    def sample_block(count: int, pool: Sequence[Sentence]) -> list[SentencePair]:
        """Similar-biased pair sample over the given sentence pool."""
        by_topic: dict[int, list[Sentence]] = {}
        pure_by_topic: dict[int, list[Sentence]] = {}
        bridge_list: list[Sentence] = []
        for s in pool:
            by_topic.setdefault(topic_of[s.id], []).append(s)
            if s.id in bridges:
                bridge_list.append(s)
            else:
                pure_by_topic.setdefault(topic_of[s.id], []).append(s)
        topics = sorted(t for t in by_topic if len(by_topic[t]) >= 2)
        n_similar = round(count * config.gold_similar_fraction)
        block: list[SentencePair] = []
        before = len(chosen)
        attempts = 0
        while len(chosen) - before < n_similar:
            attempts += 1
            if attempts > 200 * count:
                raise RuntimeError("could not sample enough distinct same-topic pairs")
            if bridge_list and rng.random() < config.gold_bridge_share:
                bridge = bridge_list[int(rng.integers(len(bridge_list)))]
                group = pure_by_topic.get(topic_of[bridge.id], [])
                if not group:
                    continue
                other = group[int(rng.integers(len(group)))]
                if add_pair(bridge, other):
                    block.append(chosen[(min(bridge.id, other.id), max(bridge.id, other.id))])
                continue
            group = by_topic[topics[int(rng.integers(len(topics)))]]
            i, j = rng.choice(len(group), size=2, replace=False)
            if add_pair(group[int(i)], group[int(j)]):
                a, b = group[int(i)], group[int(j)]
                block.append(chosen[(min(a.id, b.id), max(a.id, b.id))])
        while len(chosen) - before < count:
            attempts += 1
            if attempts > 200 * count:
                raise RuntimeError("could not sample enough distinct cross-topic pairs")
            t1, t2 = rng.choice(len(topics), size=2, replace=False)
            g1, g2 = by_topic[topics[int(t1)]], by_topic[topics[int(t2)]]
            a = g1[int(rng.integers(len(g1)))]
            b = g2[int(rng.integers(len(g2)))]
            if add_pair(a, b):
                block.append(chosen[(min(a.id, b.id), max(a.id, b.id))])
        return block

    # Dev/test pairs reuse the sentences covered by the training pairs
    # (pair-level split hygiene, sentence reuse as in STS-style corpora),
    # so candidate pairs over training sentences can inform evaluation.
    train_block = sample_block(config.gold_train_pairs, sentences)
    pool_ids = {s.id for p in train_block for s in (p.a, p.b)}
    pool = [s for s in sentences if s.id in pool_ids]
    dev_block = sample_block(config.gold_dev_pairs, pool)
    test_block = sample_block(config.gold_test_pairs, pool)

    def label_block(block: list[SentencePair]) -> tuple[LabeledPair, ...]:
        return tuple(LabeledPair(p, label_fn(p), "gold") for p in block)

    return PairDataset(  # type: ignore[arg-type]
        task=task,
        train=label_block(train_block),
        dev=label_block(dev_block),
        test=label_block(test_block),
    )


def build_in_domain_world(seed: int, config: LabConfig | None = None) -> LabWorld:
    """A regression-task world: gold labels are the true similarities."""
    config = config or LabConfig()
    oracle_seed = stable_seed(seed, "oracle")
    truth = SyntheticOracle(dim=config.oracle_dim, seed=oracle_seed, noise=0.0)
    labeler = SyntheticOracle(dim=config.oracle_dim, seed=oracle_seed, noise=config.oracle_noise)
    anchors = find_anchor_tokens(
        config.topics,
        config.oracle_dim,
        oracle_seed,
        prefix="anchor",
        window=config.anchor_window,
        pool=config.anchor_pool,
    )
    interner = SentenceInterner()
    corpus, topic_of, bridges = _make_sentences(config, seed, "d", anchors, oracle_seed, interner)
    gold = _sample_gold_pairs(
        config,
        seed,
        corpus,
        topic_of,
        bridges,
        lambda pair: truth.true_similarity(pair.a.text, pair.b.text),
        task="regression",
    )
    return LabWorld(seed, config, corpus, topic_of, bridges, gold, truth, labeler)


# --- in-domain experiment -------------------------------------------------

IN_DOMAIN_STRATEGIES = ("none", "bm25", "kde", "rs")


@dataclass
class InDomainRunResult:
    seed: int
    scores: dict[str, float]
    reports: dict[str, SilverReport]


def _make_task(
    train_pairs: Sequence[LabeledPair],
    dev_pairs: Sequence[LabeledPair],
    featurizer: SentenceFeaturizer,
    config: LabConfig,
) -> ToyBiEncoderTask:
    return ToyBiEncoderTask(
        train_pairs,
        dev_pairs,
        featurizer,
        embed_dim=config.embed_dim,
        total_steps=config.train_steps,
        batch_size=config.batch_size,
        learning_rate=config.learning_rate,
    )


def run_in_domain_experiment(
    seed: int,
    config: LabConfig | None = None,
    strategies: Sequence[str] = IN_DOMAIN_STRATEGIES,
) -> InDomainRunResult:
    """Train the toy bi-encoder on gold plus each strategy's silver data.

    Returns held-out test Spearman (x100) per strategy; "none" is the
    gold-only baseline. All variants share the training seed so that the
    only difference between them is the training data.
    """
    config = config or LabConfig()
    world = build_in_domain_world(seed, config)
    featurizer = SentenceFeaturizer(dim=config.feature_dim, seed=stable_seed(seed, "features"))
    train_seed = stable_seed(seed, "train")
    test_pairs = [lp.pair for lp in world.gold.test]
    test_labels = [lp.score for lp in world.gold.test]

    scores: dict[str, float] = {}
    reports: dict[str, SilverReport] = {}
    gold_state = None

    ordered = ["none"] + [s for s in strategies if s != "none"]
    for strategy in ordered:
        if strategy == "none":
            task = _make_task(world.gold.train, world.gold.dev, featurizer, config)
            state = task.train(train_seed)
            gold_state = (task, state)
            if "none" in strategies:
                preds = task.predict(state, test_pairs)
                scores["none"] = 100.0 * spearman(preds, test_labels)
            continue

        sampling = SamplingConfig(
            strategy=strategy,  # type: ignore[arg-type]
            top_k=config.top_k,
            rs_pair_budget=config.rs_pair_budget,
            seed=stable_seed(seed, "sample", strategy) % 2**31,
        )
        index = None
        matrix = None
        universe = None
        if strategy in ("bm25", "bm25_ss"):
            universe = unique_sentences(world.gold, splits=("train",))
            index = Bm25Index.build(universe)
        if strategy in ("ss", "bm25_ss"):
            universe = universe or unique_sentences(world.gold, splits=("train",))
            assert gold_state is not None
            task0, state0 = gold_state
            matrix = EmbeddingMatrix.from_embedder(universe, task0.embedder(state0))
        candidates = generate_candidates(sampling, world.gold, index=index, matrix=matrix)
        silver, report = build_silver(
            candidates,
            world.labeler,
            filter_kind="kde" if strategy == "kde" else "none",
            gold=world.gold,
            seed=stable_seed(seed, "filter", strategy) % 2**31,
            strategy_label=strategy,
        )
        merged = merge_gold_silver(world.gold, silver)
        task = _make_task(merged.train, world.gold.dev, featurizer, config)
        state = task.train(train_seed)
        preds = task.predict(state, test_pairs)
        scores[strategy] = 100.0 * spearman(preds, test_labels)
        reports[strategy] = report
    return InDomainRunResult(seed=seed, scores=scores, reports=reports)


# --- cross-domain experiment ----------------------------------------------

@dataclass(frozen=True)
class CrossDomainConfig:
    # Duplicate questions in forum data are rarely near-copies, so the
    # cross-domain worlds use weak anchors: same-topic pairs share little
    # surface text, and half the test negatives share a filler word,
    # baiting models that only track lexical overlap.
    lab: LabConfig = field(
        default_factory=lambda: LabConfig(
            sentences_per_topic=40,
            bridge_sentences=0,
            anchor_repeats=3,
            topic_words_range=(2, 4),
            junk_words_range=(1, 3),
            gold_train_pairs=60,
            gold_dev_pairs=30,
            gold_test_pairs=30,
            gold_similar_fraction=0.5,
            gold_bridge_share=0.0,
        )
    )
    target_test_positives: int = 30
    target_negatives_per_positive: int = 20
    hard_negative_share: float = 0.5
    adaptation_pairs: int = 800
    fpr_cap: float = 0.05


@dataclass
class CrossDomainRunResult:
    seed: int
    source_auc: float
    adapted_auc: float
    adaptation_pairs: int


def _binary_label(topic_of: dict[int, int], pair: SentencePair) -> float:
    return 1.0 if topic_of[pair.a.id] == topic_of[pair.b.id] else 0.0


def _sample_cross_domain_eval(
    config: CrossDomainConfig,
    seed: int,
    sentences: Sequence[Sentence],
    topic_of: dict[int, int],
    exclude: set[tuple[int, int]],
) -> list[LabeledPair]:
    """Duplicate-detection test pairs with a skewed positive ratio.

    A configurable share of the negatives is "hard": the two sentences
    come from different topics but share a filler word.
    """
    rng = np.random.default_rng(stable_seed(seed, "target-test"))
    by_topic: dict[int, list[Sentence]] = {}
    for s in sentences:
        by_topic.setdefault(topic_of[s.id], []).append(s)
    topics = sorted(by_topic)
    by_token: dict[str, list[Sentence]] = {}
    for s in sentences:
        for token in set(tokenize(s.text)):
            by_token.setdefault(token, []).append(s)
    shared_junk = sorted(
        t for t, group in by_token.items()
        if "junk" in t and len({topic_of[s.id] for s in group}) >= 2
    )
    chosen: dict[tuple[int, int], LabeledPair] = {}

    def try_add(a: Sentence, b: Sentence, label: float) -> bool:
        if a.id == b.id:
            return False
        key = (min(a.id, b.id), max(a.id, b.id))
        if key in chosen or key in exclude:
            return False
        first, second = (a, b) if a.id < b.id else (b, a)
        chosen[key] = LabeledPair(SentencePair(first, second), label, "gold")
        return True

    need_pos = config.target_test_positives
    need_neg = config.target_test_positives * config.target_negatives_per_positive
    attempts = 0
    while need_pos > 0:
        attempts += 1
        if attempts > 10_000 * config.target_test_positives:
            raise RuntimeError("could not sample target test positives")
        group = by_topic[topics[int(rng.integers(len(topics)))]]
        i, j = rng.choice(len(group), size=2, replace=False)
        if try_add(group[int(i)], group[int(j)], 1.0):
            need_pos -= 1
    while need_neg > 0:
        attempts += 1
        if attempts > 10_000 * config.target_test_positives:
            raise RuntimeError("could not sample target test negatives")
        if shared_junk and rng.random() < config.hard_negative_share:
            token = shared_junk[int(rng.integers(len(shared_junk)))]
            group = by_token[token]
            i, j = rng.integers(len(group)), rng.integers(len(group))
            a, b = group[int(i)], group[int(j)]
            if topic_of[a.id] != topic_of[b.id] and try_add(a, b, 0.0):
                need_neg -= 1
            continue
        t1, t2 = rng.choice(len(topics), size=2, replace=False)
        g1, g2 = by_topic[topics[int(t1)]], by_topic[topics[int(t2)]]
        a = g1[int(rng.integers(len(g1)))]
        b = g2[int(rng.integers(len(g2)))]
        if try_add(a, b, 0.0):
            need_neg -= 1
    return list(chosen.values())


def run_cross_domain_experiment(
    seed: int, config: CrossDomainConfig | None = None
) -> CrossDomainRunResult:
    """Compare source-only training against target-silver adaptation.

    The source and target domains share no vocabulary. The source model
    trains on binary gold duplicate labels; the adapted model trains on
    target pairs soft-labeled by the oracle (standing in for a
    cross-encoder fine-tuned on the source domain). Both are scored by
    partial ROC area on the target test set.
    """
    config = config or CrossDomainConfig()
    lab = config.lab
    oracle_seed = stable_seed(seed, "oracle")
    truth = SyntheticOracle(dim=lab.oracle_dim, seed=oracle_seed, noise=0.0)
    labeler = SyntheticOracle(dim=lab.oracle_dim, seed=oracle_seed, noise=lab.oracle_noise)

    src_anchors = find_anchor_tokens(
        lab.topics, lab.oracle_dim, oracle_seed, prefix="srcanchor",
        window=lab.anchor_window, pool=lab.anchor_pool,
    )
    tgt_anchors = find_anchor_tokens(
        lab.topics, lab.oracle_dim, oracle_seed, prefix="tgtanchor",
        window=lab.anchor_window, pool=lab.anchor_pool,
    )
    interner = SentenceInterner()
    src_sentences, src_topic_of, _ = _make_sentences(lab, seed, "src", src_anchors, oracle_seed, interner)
    tgt_sentences, tgt_topic_of, _ = _make_sentences(lab, stable_seed(seed, "tgt"), "tgt", tgt_anchors, oracle_seed, interner)

    source_gold = _sample_gold_pairs(
        lab,
        seed,
        src_sentences,
        src_topic_of,
        set(),
        lambda pair: _binary_label(src_topic_of, pair),
        task="classification",
    )

    # Target pairs to adapt on: a uniform random draw over the target corpus.
    sampling = SamplingConfig(
        strategy="rs",
        rs_pair_budget=config.adaptation_pairs,
        seed=stable_seed(seed, "adapt") % 2**31,
        include_gold_pairs=True,
    )
    target_pairs = generate_candidates(sampling, _corpus_dataset(tgt_sentences))
    adapt_keys = {p.key for p in target_pairs}
    target_test = _sample_cross_domain_eval(
        config, seed, tgt_sentences, tgt_topic_of, exclude=adapt_keys
    )

    featurizer = SentenceFeaturizer(dim=lab.feature_dim, seed=stable_seed(seed, "features"))
    train_seed = stable_seed(seed, "train")
    test_pairs = [lp.pair for lp in target_test]
    test_labels = [int(lp.score) for lp in target_test]

    source_task = _make_task(source_gold.train, source_gold.dev, featurizer, lab)
    source_state = source_task.train(train_seed)
    source_preds = source_task.predict(source_state, test_pairs)
    source_auc = auc_at(config.fpr_cap, source_preds, test_labels)

    adapted = build_cross_domain_silver(source_gold, target_pairs, labeler)
    adapted_task = _make_task(adapted.train, source_gold.dev, featurizer, lab)
    adapted_state = adapted_task.train(train_seed)
    adapted_preds = adapted_task.predict(adapted_state, test_pairs)
    adapted_auc = auc_at(config.fpr_cap, adapted_preds, test_labels)

    return CrossDomainRunResult(
        seed=seed,
        source_auc=source_auc,
        adapted_auc=adapted_auc,
        adaptation_pairs=len(target_pairs),
    )


def _corpus_dataset(sentences: Sequence[Sentence]) -> PairDataset:
    """Wrap a corpus so candidate generation can see every sentence.

    Candidate generation draws from the sentences of the training split;
    a synthetic spanning chain of zero-labeled pairs exposes the corpus
    without adding real label information.
    """
    chain = tuple(
        LabeledPair(SentencePair(a, b) if a.id < b.id else SentencePair(b, a), 0.0, "gold")
        for a, b in zip(sentences[:-1], sentences[1:])
    )
    return PairDataset(task="regression", train=chain)
