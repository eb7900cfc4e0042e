import math

import numpy as np
import pytest

from silverforge.data import LabeledPair, PairDataset, Sentence, SentencePair
from silverforge.distmatch import (
    BANDWIDTH_FLOOR,
    GRID,
    DensityModel,
    RatioSpec,
    acceptance_probability,
    fit_kde,
    kde_filter,
    kl_divergence,
    ratio_filter,
    score_histogram,
    silverman_bandwidth,
)


def naive_reflected_kde(points, scores, h):
    """Direct kernel sum with boundary reflection, one point at a time."""
    out = []
    norm = 1.0 / (len(scores) * h * math.sqrt(2 * math.pi))
    for x in points:
        total = 0.0
        for s in scores:
            for image in (s, -s, 2.0 - s):
                z = (x - image) / h
                total += math.exp(-0.5 * z * z)
        out.append(total * norm)
    return np.asarray(out)


def pairs_with_scores(scores, provenance="silver"):
    out = []
    for i, s in enumerate(scores):
        pair = SentencePair(Sentence(2 * i, f"left {i}"), Sentence(2 * i + 1, f"right {i}"))
        out.append(LabeledPair(pair, float(s), provenance))
    return out


class TestFitKde:
    def test_all_identical_rejected(self):
        with pytest.raises(ValueError, match="degenerate"):
            fit_kde([0.5] * 10)

    def test_too_few_rejected(self):
        with pytest.raises(ValueError, match="at least 5"):
            fit_kde([0.1, 0.2, 0.3, 0.4])

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            fit_kde([0.1, 0.2, 0.3, 0.4, 1.4])

    def test_symmetric_sample_gives_symmetric_density(self):
        scores = [0.2] * 30 + [0.8] * 30
        model = fit_kde(scores)
        np.testing.assert_allclose(model.densities, model.densities[::-1], atol=1e-6)

    def test_matches_naive_kernel_sum(self):
        rng = np.random.default_rng(8)
        scores = np.clip(np.concatenate([rng.normal(0.3, 0.1, 60), rng.normal(0.8, 0.05, 40)]), 0, 1)
        model = fit_kde(scores)
        expected = naive_reflected_kde(GRID, scores, model.bandwidth)
        np.testing.assert_allclose(model.densities, expected, atol=1e-9)

    def test_integrates_to_one(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            scores = rng.beta(2, 3, size=int(rng.integers(8, 200)))
            if np.ptp(scores) == 0:
                continue
            model = fit_kde(scores)
            mass = np.trapezoid(model.densities, GRID)
            assert 0.98 <= mass <= 1.02

    def test_bandwidth_rule(self):
        rng = np.random.default_rng(10)
        scores = rng.random(50)
        std = np.std(scores, ddof=1)
        q75, q25 = np.percentile(scores, [75, 25])
        expected = 0.9 * min(std, (q75 - q25) / 1.34) * 50 ** (-0.2)
        assert silverman_bandwidth(scores) == pytest.approx(expected)

    def test_bandwidth_floor(self):
        # near-degenerate spread hits the floor instead of collapsing
        scores = np.array([0.5, 0.5, 0.5, 0.5000001, 0.5, 0.5, 0.4999999, 0.5])
        assert silverman_bandwidth(scores) == BANDWIDTH_FLOOR

    def test_grid_is_512_points_on_unit_interval(self):
        assert len(GRID) == 512
        assert GRID[0] == 0.0 and GRID[-1] == 1.0


def constant_model(value):
    return DensityModel(kind="gold", scores=(0.0,), bandwidth=0.1, densities=np.full(512, value))


class TestAcceptanceProbability:
    def test_gold_dominates(self):
        assert acceptance_probability(constant_model(0.4), constant_model(0.2), 0.5) == 1.0

    def test_ratio_branch(self):
        assert acceptance_probability(constant_model(0.1), constant_model(0.4), 0.5) == pytest.approx(0.25)

    def test_equal_densities(self):
        assert acceptance_probability(constant_model(0.3), constant_model(0.3), 0.5) == 1.0

    def test_out_of_range_score(self):
        with pytest.raises(ValueError):
            acceptance_probability(constant_model(1.0), constant_model(1.0), 1.5)

    def test_in_unit_interval_everywhere(self):
        rng = np.random.default_rng(11)
        gold = fit_kde(rng.beta(5, 2, 100))
        silver = fit_kde(rng.beta(2, 5, 100))
        for s in np.linspace(0, 1, 100):
            q = acceptance_probability(gold, silver, float(s))
            assert 0.0 <= q <= 1.0
            if gold.evaluate(float(s)) >= silver.evaluate(float(s)):
                assert q == 1.0


class TestKdeFilter:
    def test_identical_distributions_keep_nearly_all(self):
        rng = np.random.default_rng(12)
        scores = rng.beta(3, 3, 400)
        silver = pairs_with_scores(scores)
        kept = kde_filter(scores, silver, seed=0)
        assert len(kept) >= 0.9 * len(silver)

    def test_never_grows_and_reproducible(self):
        rng = np.random.default_rng(13)
        gold = rng.beta(5, 2, 80)
        silver = pairs_with_scores(rng.beta(2, 5, 300))
        kept_a = kde_filter(gold, silver, seed=7)
        kept_b = kde_filter(gold, silver, seed=7)
        assert len(kept_a) <= len(silver)
        assert [lp.pair.key for lp in kept_a] == [lp.pair.key for lp in kept_b]
        kept_set = {lp.pair.key for lp in kept_a}
        assert kept_set <= {lp.pair.key for lp in silver}

    def test_skewed_silver_thinned_toward_gold(self):
        reductions = 0
        for seed in range(10):
            rng = np.random.default_rng(100 + seed)
            gold = np.clip(rng.normal(0.65, 0.18, 120), 0, 1)
            silver_scores = np.clip(
                np.concatenate([rng.normal(0.15, 0.08, 400), rng.normal(0.7, 0.15, 100)]), 0, 1
            )
            silver = pairs_with_scores(silver_scores)
            kept = kde_filter(gold, silver, seed=seed)
            gold_model = fit_kde(gold)
            before = kl_divergence(gold_model, fit_kde(silver_scores))
            after = kl_divergence(gold_model, fit_kde([lp.score for lp in kept]))
            reductions += after < before
        assert reductions >= 9

    def test_empty_silver_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            kde_filter([0.1, 0.2, 0.3, 0.4, 0.5], [], seed=0)


class TestRatioFilter:
    def test_ratio_example(self):
        # gold 30:70; 50 silver positives -> round(50 * 70/30) = 117 negatives
        spec = RatioSpec(positives=30, negatives=70)
        silver = pairs_with_scores([0.9] * 50 + [0.1] * 900)
        kept = ratio_filter(spec, silver, threshold=0.5, seed=0)
        positives = [lp for lp in kept if lp.score >= 0.5]
        negatives = [lp for lp in kept if lp.score < 0.5]
        assert len(positives) == 50
        assert len(negatives) == 117

    def test_negatives_capped_at_available(self):
        spec = RatioSpec(positives=1, negatives=10)
        silver = pairs_with_scores([0.9] * 5 + [0.1] * 3)
        kept = ratio_filter(spec, silver, threshold=0.5, seed=0)
        assert len(kept) == 8

    def test_no_positives_rejected(self):
        spec = RatioSpec(positives=1, negatives=1)
        with pytest.raises(ValueError, match="no silver positives"):
            ratio_filter(spec, pairs_with_scores([0.1, 0.2]), threshold=0.5, seed=0)

    def test_ratio_within_one_pair(self):
        rng = np.random.default_rng(14)
        for seed in range(20):
            n_pos_gold = int(rng.integers(1, 50))
            n_neg_gold = int(rng.integers(1, 50))
            spec = RatioSpec(n_pos_gold, n_neg_gold)
            scores = rng.random(400)
            silver = pairs_with_scores(scores)
            if not np.any(scores >= 0.5):
                continue
            kept = ratio_filter(spec, silver, threshold=0.5, seed=seed)
            pos = sum(lp.score >= 0.5 for lp in kept)
            neg = len(kept) - pos
            target = pos * n_neg_gold / n_pos_gold
            available = sum(s < 0.5 for s in scores)
            assert abs(neg - min(target, available)) <= 1

    def test_preserves_input_order(self):
        spec = RatioSpec(positives=1, negatives=1)
        silver = pairs_with_scores([0.9, 0.1, 0.8, 0.2, 0.7])
        kept = ratio_filter(spec, silver, threshold=0.5, seed=3)
        indices = [silver.index(lp) for lp in kept]
        assert indices == sorted(indices)

    def test_threshold_validation(self):
        with pytest.raises(ValueError):
            ratio_filter(RatioSpec(1, 1), pairs_with_scores([0.9]), threshold=0.0, seed=0)

    def test_from_gold_train(self):
        pairs = pairs_with_scores([1.0, 1.0, 0.0], provenance="gold")
        ds = PairDataset(task="classification", train=tuple(pairs))
        spec = RatioSpec.from_gold_train(ds)
        assert (spec.positives, spec.negatives) == (2, 1)


class TestKlDivergence:
    def test_identical_samples_zero(self):
        rng = np.random.default_rng(15)
        scores = rng.beta(3, 2, 150)
        a = fit_kde(scores)
        b = fit_kde(scores)
        assert kl_divergence(a, b) < 1e-9

    def test_decreases_as_silver_approaches_gold(self):
        rng = np.random.default_rng(16)
        gold = fit_kde(np.clip(rng.normal(0.7, 0.05, 400), 0, 1))
        values = []
        for mean in (0.3, 0.4, 0.5, 0.6, 0.7):
            silver = fit_kde(np.clip(rng.normal(mean, 0.05, 400), 0, 1))
            values.append(kl_divergence(gold, silver))
        assert values[0] > 1.0
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_nonnegative_on_random_pairs(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            a = fit_kde(rng.beta(rng.integers(1, 6), rng.integers(1, 6), 100))
            b = fit_kde(rng.beta(rng.integers(1, 6), rng.integers(1, 6), 100))
            assert kl_divergence(a, b) >= 0.0


class TestScoreHistogram:
    def test_masses_sum_to_one(self):
        rng = np.random.default_rng(18)
        scores = rng.random(500)
        rows = score_histogram(scores, bins=20)
        total = sum(density for _, density in rows) * (1 / 20)
        assert total == pytest.approx(1.0)

    def test_bin_midpoints(self):
        rows = score_histogram([0.1, 0.9], bins=2)
        assert [mid for mid, _ in rows] == [0.25, 0.75]

    def test_bins_validation(self):
        with pytest.raises(ValueError):
            score_histogram([0.5], bins=0)
