"""Distribution matching of silver scores to gold scores.

Regression tasks use Gaussian kernel density estimates of both score
distributions and thin the silver set by rejection sampling: a silver
pair with score s survives with probability 1 where the gold density
dominates, and with the density ratio gold/silver elsewhere. This pulls
the silver score distribution toward the gold one, shrinking their KL
divergence. Classification tasks instead keep every positive and
subsample negatives to the gold positive/negative ratio.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .data import LabeledPair, PairDataset

GRID_SIZE = 512
GRID = np.linspace(0.0, 1.0, GRID_SIZE)
BANDWIDTH_FLOOR = 1e-3
DENSITY_FLOOR = 1e-10


def silverman_bandwidth(scores: np.ndarray) -> float:
    """0.9 * min(std, IQR / 1.34) * n^(-1/5), floored at 1e-3."""
    std = float(np.std(scores, ddof=1))
    q75, q25 = np.percentile(scores, [75, 25])
    spread = min(std, (q75 - q25) / 1.34)
    return max(0.9 * spread * len(scores) ** (-1 / 5), BANDWIDTH_FLOOR)


def _reflected_kernel_sum(points: np.ndarray, scores: np.ndarray, h: float) -> np.ndarray:
    """Gaussian kernel density at ``points``, boundary-reflected at 0 and 1.

    Each sample contributes its kernel plus mirror images at both
    boundaries, so the mass that would leak outside [0, 1] is folded back
    and the grid densities integrate to ~1.
    """
    out = np.zeros(len(points))
    chunk = max(1, 2_000_000 // max(len(points), 1))
    norm = 1.0 / (len(scores) * h * np.sqrt(2.0 * np.pi))
    for start in range(0, len(scores), chunk):
        s = scores[start : start + chunk]
        for image in (s, -s, 2.0 - s):
            z = (points[:, None] - image[None, :]) / h
            out += np.exp(-0.5 * z * z).sum(axis=1)
    return out * norm


@dataclass
class DensityModel:
    """A kernel density estimate of a score sample on the unit interval."""

    kind: str
    scores: tuple[float, ...]
    bandwidth: float
    densities: np.ndarray

    @property
    def grid(self) -> np.ndarray:
        return GRID

    def evaluate(self, s: float | np.ndarray) -> float | np.ndarray:
        """Density at s by linear interpolation on the evaluation grid."""
        values = np.interp(np.asarray(s, dtype=np.float64), GRID, self.densities)
        return float(values) if np.ndim(s) == 0 else values


def fit_kde(scores: Sequence[float], kind: str = "gold") -> DensityModel:
    """Fit a boundary-reflected Gaussian KDE with Silverman bandwidth."""
    arr = np.asarray(scores, dtype=np.float64)
    if arr.ndim != 1 or len(arr) < 5:
        raise ValueError("need at least 5 scores to fit a density")
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError("scores must be finite and within [0, 1]")
    if np.ptp(arr) == 0.0:
        raise ValueError("degenerate sample: all scores identical")
    h = silverman_bandwidth(arr)
    densities = _reflected_kernel_sum(GRID, arr, h)
    return DensityModel(kind=kind, scores=tuple(arr.tolist()), bandwidth=h, densities=densities)


def acceptance_probability(
    gold: DensityModel, silver: DensityModel, s: float
) -> float:
    """Probability of retaining a silver pair with score s.

    1 where the gold density is at least the silver density, otherwise
    the ratio of the two densities.
    """
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"score {s} outside [0, 1]")
    f_gold = float(gold.evaluate(s))
    f_silver = float(silver.evaluate(s))
    if f_gold >= f_silver:
        return 1.0
    return f_gold / max(f_silver, DENSITY_FLOOR)


def kde_filter(
    gold_scores: Sequence[float], silver: Sequence[LabeledPair], seed: int = 0
) -> list[LabeledPair]:
    """Thin silver pairs toward the gold score distribution.

    Each pair is kept independently with its acceptance probability. The
    accept/reject draws come from one up-front seeded stream aligned with
    the input order, so results are reproducible and independent of any
    evaluation parallelism.
    """
    if not silver:
        raise ValueError("silver set is empty")
    gold_model = fit_kde(gold_scores, kind="gold")
    silver_scores = np.asarray([lp.score for lp in silver])
    silver_model = fit_kde(silver_scores, kind="silver")
    f_gold = gold_model.evaluate(silver_scores)
    f_silver = np.maximum(silver_model.evaluate(silver_scores), DENSITY_FLOOR)
    q = np.where(f_gold >= f_silver, 1.0, f_gold / f_silver)
    u = np.random.default_rng(seed).random(len(silver))
    return [lp for lp, keep in zip(silver, u < q) if keep]


@dataclass(frozen=True)
class RatioSpec:
    """Positive/negative counts of the gold training split."""

    positives: int
    negatives: int

    def __post_init__(self):
        if self.positives < 1 or self.negatives < 1:
            raise ValueError("gold ratio needs at least one pair of each class")

    @classmethod
    def from_gold_train(cls, gold: PairDataset) -> "RatioSpec":
        labels = [lp.score for lp in gold.train]
        return cls(
            positives=sum(1 for s in labels if s == 1.0),
            negatives=sum(1 for s in labels if s == 0.0),
        )


def ratio_filter(
    spec: RatioSpec,
    silver: Sequence[LabeledPair],
    threshold: float = 0.5,
    seed: int = 0,
) -> list[LabeledPair]:
    """Keep all silver positives, subsample negatives to the gold ratio.

    A silver pair counts as positive when its soft score is at least the
    threshold. The negative target is round(P * negatives / positives),
    capped at the available negatives; sampling is uniform without
    replacement and the original input order is preserved.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError("positive threshold must be in (0, 1)")
    pos_idx = [i for i, lp in enumerate(silver) if lp.score >= threshold]
    neg_idx = [i for i, lp in enumerate(silver) if lp.score < threshold]
    if not pos_idx:
        raise ValueError(
            f"no silver positives at threshold {threshold}; cannot establish ratio"
        )
    target = round(len(pos_idx) * spec.negatives / spec.positives)
    target = min(target, len(neg_idx))
    rng = np.random.default_rng(seed)
    chosen = rng.choice(len(neg_idx), size=target, replace=False) if target else []
    keep = set(pos_idx) | {neg_idx[int(i)] for i in chosen}
    return [lp for i, lp in enumerate(silver) if i in keep]


def _normalized_grid_density(model: DensityModel) -> np.ndarray:
    floored = np.maximum(model.densities, DENSITY_FLOOR)
    return floored / np.trapezoid(floored, GRID)


def kl_divergence(gold: DensityModel, silver: DensityModel) -> float:
    """Trapezoid KL divergence of the two grid densities.

    Both densities are floored and renormalized to unit mass first, which
    keeps the integral finite in empty-score regions and nonnegative by
    Gibbs' inequality.
    """
    p = _normalized_grid_density(gold)
    q = _normalized_grid_density(silver)
    return float(np.trapezoid(p * np.log(p / q), GRID))


def score_histogram(
    scores: Sequence[float], bins: int = 20
) -> list[tuple[float, float]]:
    """(bin midpoint, density) rows over [0, 1] for plot-ready output."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    counts, edges = np.histogram(
        np.asarray(scores, dtype=np.float64), bins=bins, range=(0.0, 1.0), density=True
    )
    mids = (edges[:-1] + edges[1:]) / 2.0
    return [(float(m), float(c)) for m, c in zip(mids, counts)]
