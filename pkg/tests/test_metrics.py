import itertools

import numpy as np
import pytest

from silverforge.metrics import (
    auc_at,
    average_ranks,
    f1_positive,
    jaccard_baseline,
    majority_baseline,
    roc_points,
    spearman,
    threshold_search,
)


def oracle_spearman(pred, gold):
    """Rank-then-Pearson with midranks, written independently."""

    def midranks(x):
        order = sorted(range(len(x)), key=lambda i: x[i])
        ranks = [0.0] * len(x)
        i = 0
        while i < len(order):
            j = i
            while j + 1 < len(order) and x[order[j + 1]] == x[order[i]]:
                j += 1
            for k in range(i, j + 1):
                ranks[order[k]] = (i + j) / 2 + 1
            i = j + 1
        return ranks

    rp, rg = midranks(list(pred)), midranks(list(gold))
    return float(np.corrcoef(rp, rg)[0, 1])


class TestSpearman:
    def test_identical_ranking(self):
        assert spearman([0.1, 0.2, 0.3], [1, 2, 3]) == pytest.approx(1.0)

    def test_reversed_ranking(self):
        assert spearman([0.3, 0.2, 0.1], [1, 2, 3]) == pytest.approx(-1.0)

    def test_known_instance(self):
        pred = [0.5, 0.1, 0.4, 0.9]
        gold = [0.3, 0.2, 0.1, 0.8]
        assert spearman(pred, gold) == pytest.approx(oracle_spearman(pred, gold), abs=1e-12)

    def test_random_instances_with_ties(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            n = int(rng.integers(3, 30))
            pred = rng.integers(0, 6, size=n).astype(float)
            gold = rng.integers(0, 6, size=n).astype(float)
            if np.ptp(pred) == 0 or np.ptp(gold) == 0:
                continue
            assert spearman(pred, gold) == pytest.approx(oracle_spearman(pred, gold), abs=1e-12)

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(1)
        pred = rng.random(40)
        gold = rng.random(40)
        base = spearman(pred, gold)
        assert spearman(np.exp(3 * pred), gold) == pytest.approx(base, abs=1e-12)
        assert spearman(pred, gold**3 + 5) == pytest.approx(base, abs=1e-12)

    def test_errors(self):
        with pytest.raises(ValueError, match="mismatch"):
            spearman([1, 2], [1, 2, 3])
        with pytest.raises(ValueError, match="constant"):
            spearman([1, 1, 1], [1, 2, 3])
        with pytest.raises(ValueError, match="at least 2"):
            spearman([1.0], [1.0])

    def test_average_ranks_ties(self):
        assert average_ranks([10, 20, 20, 30]).tolist() == [1.0, 2.5, 2.5, 4.0]


class TestF1Positive:
    def test_all_correct(self):
        assert f1_positive([1, 0, 1], [1, 0, 1]) == 1.0

    def test_known_counts(self):
        # TP=2, FP=1, FN=1 -> 2*2 / (2*2 + 1 + 1) = 2/3
        pred = [1, 1, 1, 0, 0]
        gold = [1, 1, 0, 1, 0]
        assert f1_positive(pred, gold) == pytest.approx(2 / 3)

    def test_zero_denominator_convention(self):
        assert f1_positive([0, 0], [0, 0]) == 0.0

    def test_order_invariance(self):
        rng = np.random.default_rng(2)
        pred = rng.integers(0, 2, size=30)
        gold = rng.integers(0, 2, size=30)
        perm = rng.permutation(30)
        assert f1_positive(pred, gold) == f1_positive(pred[perm], gold[perm])

    def test_binary_validation(self):
        with pytest.raises(ValueError):
            f1_positive([0, 2], [0, 1])


def oracle_threshold_search(scores, gold):
    uniq = sorted(set(scores))
    candidates = {0.0, 1.0}
    for a, b in zip(uniq, uniq[1:]):
        candidates.add((a + b) / 2)
    best = None
    for t in sorted(candidates):
        preds = [int(s >= t) for s in scores]
        tp = sum(p and g for p, g in zip(preds, gold))
        fp = sum(p and not g for p, g in zip(preds, gold))
        fn = sum((not p) and g for p, g in zip(preds, gold))
        f1 = 2 * tp / (2 * tp + fp + fn) if (2 * tp + fp + fn) else 0.0
        if best is None or f1 > best[1]:
            best = (t, f1)
    return best


class TestThresholdSearch:
    def test_separable_returns_smallest_midpoint(self):
        scores = [0.1, 0.2, 0.8, 0.9]
        gold = [0, 0, 1, 1]
        t, f1 = threshold_search(scores, gold)
        assert f1 == 1.0
        assert t == pytest.approx(0.5)

    def test_degenerate_identical_scores(self):
        t, f1 = threshold_search([0.4, 0.4, 0.4], [1, 0, 1])
        # 0 predicts everything positive: F1 = 2*2/(2*2+1+0) = 0.8; 1 predicts nothing: 0
        assert (t, f1) == (0.0, pytest.approx(0.8))

    def test_matches_exhaustive_oracle(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            n = 50
            scores = np.round(rng.random(n), 2).tolist()
            gold = rng.integers(0, 2, size=n).tolist()
            if sum(gold) in (0, n):
                continue
            assert threshold_search(scores, gold) == pytest.approx(oracle_threshold_search(scores, gold))

    def test_dev_f1_dominates_fixed_thresholds(self):
        rng = np.random.default_rng(4)
        scores = rng.random(80)
        gold = (scores + rng.normal(0, 0.3, size=80) > 0.5).astype(int)
        if gold.sum() in (0, 80):
            pytest.skip("degenerate draw")
        _, best = threshold_search(scores, gold)
        for t in np.arange(0.1, 0.95, 0.1):
            assert best >= f1_positive((scores >= t).astype(int), gold)

    def test_single_class_rejected(self):
        with pytest.raises(ValueError, match="both classes"):
            threshold_search([0.1, 0.9], [1, 1])


def oracle_roc_area(scores, gold, cap):
    """Explicit ROC enumeration with atomic tie groups and cap interpolation."""
    pos = sum(gold)
    neg = len(gold) - pos
    points = [(0.0, 0.0)]
    tp = fp = 0
    for value in sorted(set(scores), reverse=True):
        for s, g in zip(scores, gold):
            if s == value:
                tp, fp = tp + (g == 1), fp + (g == 0)
        points.append((fp / neg, tp / pos))
    area = 0.0
    for (f0, t0), (f1, t1) in zip(points, points[1:]):
        if f1 <= cap:
            area += (f1 - f0) * (t0 + t1) / 2
        elif f0 < cap:
            tc = t0 + (t1 - t0) * (cap - f0) / (f1 - f0)
            area += (cap - f0) * (t0 + tc) / 2
            break
        else:
            break
    return area / cap


class TestAucAt:
    def test_perfect_separation(self):
        assert auc_at(0.05, [0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0]) == pytest.approx(1.0)

    def test_worst_ranker(self):
        assert auc_at(0.05, [0.1, 0.2, 0.8, 0.9], [1, 1, 0, 0]) == pytest.approx(0.0)

    def test_ties_match_enumeration_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            n = 20
            scores = np.round(rng.random(n), 1).tolist()
            gold = rng.integers(0, 2, size=n).tolist()
            if sum(gold) in (0, n):
                continue
            for cap in (0.05, 0.25, 1.0):
                assert auc_at(cap, scores, gold) == pytest.approx(
                    oracle_roc_area(scores, gold, cap), abs=1e-12
                )

    def test_full_area_equals_mann_whitney(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            n = 30
            scores = rng.permutation(n) / n  # tie-free
            gold = rng.integers(0, 2, size=n)
            if gold.sum() in (0, n):
                continue
            u = sum(
                1
                for (sp, gp), (sn, gn) in itertools.product(zip(scores, gold), repeat=2)
                if gp == 1 and gn == 0 and sp > sn
            )
            expected = u / (gold.sum() * (n - gold.sum()))
            assert auc_at(1.0, scores, gold) == pytest.approx(expected, abs=1e-12)

    def test_cap_validation(self):
        with pytest.raises(ValueError):
            auc_at(0.0, [0.5, 0.6], [0, 1])
        with pytest.raises(ValueError):
            auc_at(1.5, [0.5, 0.6], [0, 1])

    def test_single_class_rejected(self):
        with pytest.raises(ValueError, match="both classes"):
            roc_points([0.5, 0.6], [1, 1])


class TestBaselines:
    def test_jaccard_identical(self):
        assert jaccard_baseline("same text here", "same text here") == 1.0

    def test_jaccard_disjoint(self):
        assert jaccard_baseline("alpha beta", "gamma delta") == 0.0

    def test_jaccard_question_pair(self):
        # {cook, broccoli} shared of 11 distinct tokens
        value = jaccard_baseline(
            "How does one cook broccoli?", "What are the best ways to cook broccoli?"
        )
        assert value == pytest.approx(2 / 11)

    def test_jaccard_both_empty(self):
        assert jaccard_baseline("", "!!!") == 1.0

    def test_majority(self):
        assert majority_baseline([0] * 7 + [1] * 3) == 0
        assert majority_baseline([0] * 3 + [1] * 7) == 1
        assert majority_baseline([0, 1]) == 1  # tie goes positive

    def test_majority_empty_rejected(self):
        with pytest.raises(ValueError):
            majority_baseline([])
