"""Seed optimization: train several seeds, finish only the best.

Training runs converge to minima of varying quality depending on the
random seed. The harness trains every seed to a fraction of the total
steps, evaluates on the development set, then continues only the best
partial run to completion. Partial and final development scores are rank
correlated strongly enough in practice that this recovers most of the
benefit of full multi-seed training at a fraction of the cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Protocol, Sequence, runtime_checkable

from .metrics import spearman


@runtime_checkable
class Trainable(Protocol):
    """A deterministic training task, generic over the model inside.

    ``init(seed)`` builds fresh state, ``step`` advances it by one
    training step, and ``eval_dev`` scores state on the development set
    (higher is better) without mutating it.
    """

    total_steps: int

    def init(self, seed: int) -> Any: ...

    def step(self, state: Any) -> Any: ...

    def eval_dev(self, state: Any) -> float: ...


@dataclass(frozen=True)
class SeedRunConfig:
    num_seeds: int = 5
    early_stop_fraction: float = 0.20
    seeds: tuple[int, ...] | None = None
    base_seed: int = 0

    def __post_init__(self):
        if self.num_seeds < 1:
            raise ValueError("num_seeds must be >= 1")
        if not 0.0 < self.early_stop_fraction <= 1.0:
            raise ValueError("early_stop_fraction must be in (0, 1]")

    def resolved_seeds(self) -> tuple[int, ...]:
        if self.seeds is not None:
            if not self.seeds:
                raise ValueError("explicit seed list is empty")
            return tuple(self.seeds)
        return tuple(self.base_seed + i for i in range(self.num_seeds))


@dataclass(frozen=True)
class SeedRun:
    seed: int
    partial_dev: float
    final_dev: float | None
    winner: bool


@dataclass(frozen=True)
class SeedOptResult:
    best_seed: int
    final_dev: float
    runs: tuple[SeedRun, ...]


def partial_steps(fraction: float, total_steps: int) -> int:
    """ceil(fraction * total_steps), guarded against float fuzz."""
    return min(total_steps, max(0, math.ceil(fraction * total_steps - 1e-9)))


def _advance(model: Trainable, state: Any, steps: int) -> Any:
    for _ in range(steps):
        state = model.step(state)
    return state


def seed_optimize(model: Trainable, config: SeedRunConfig) -> SeedOptResult:
    """Early-stop all seeds but the best on dev; finish the winner.

    All seeds train to ceil(fraction * total_steps); the best partial dev
    scorer (ties go to the smallest seed) continues from its partial
    state to ``total_steps``, so the total work is exactly
    num_seeds * ceil(f * T) + (T - ceil(f * T)) steps.
    """
    if model.total_steps < 5:
        raise ValueError("total_steps must be >= 5")
    seeds = config.resolved_seeds()
    cut = partial_steps(config.early_stop_fraction, model.total_steps)

    states: dict[int, Any] = {}
    partial: dict[int, float] = {}
    for seed in seeds:
        state = _advance(model, model.init(seed), cut)
        states[seed] = state
        partial[seed] = model.eval_dev(state)

    best_seed = min(seeds, key=lambda s: (-partial[s], s))
    final_state = _advance(model, states[best_seed], model.total_steps - cut)
    final_dev = model.eval_dev(final_state)

    runs = tuple(
        SeedRun(
            seed=s,
            partial_dev=partial[s],
            final_dev=final_dev if s == best_seed else None,
            winner=s == best_seed,
        )
        for s in seeds
    )
    return SeedOptResult(best_seed=best_seed, final_dev=final_dev, runs=runs)


@dataclass(frozen=True)
class CheckpointCorrelation:
    fraction: float
    rho: float | None


def early_stop_correlation(
    model: Trainable,
    seeds: Sequence[int],
    checkpoints: Sequence[float],
) -> list[CheckpointCorrelation]:
    """Rank correlation between partial and final dev scores per checkpoint.

    Each seed is trained once to completion, evaluated at every requested
    fraction of the total steps along the way. A checkpoint whose partial
    scores (or whose final scores) are constant across seeds has no
    defined rank correlation and is reported with ``rho=None``.
    """
    if len(seeds) < 3:
        raise ValueError("need at least 3 seeds to correlate rankings")
    fractions = sorted(set(checkpoints))
    if any(not 0.0 < f <= 1.0 for f in fractions):
        raise ValueError("checkpoint fractions must be in (0, 1]")

    cuts = [partial_steps(f, model.total_steps) for f in fractions]
    at_checkpoint: dict[float, list[float]] = {f: [] for f in fractions}
    finals: list[float] = []
    for seed in seeds:
        state = model.init(seed)
        done = 0
        for fraction, cut in zip(fractions, cuts):
            state = _advance(model, state, cut - done)
            done = cut
            at_checkpoint[fraction].append(model.eval_dev(state))
        state = _advance(model, state, model.total_steps - done)
        finals.append(model.eval_dev(state))

    out = []
    for fraction in fractions:
        try:
            rho = spearman(at_checkpoint[fraction], finals)
        except ValueError:
            rho = None
        out.append(CheckpointCorrelation(fraction=fraction, rho=rho))
    return out
