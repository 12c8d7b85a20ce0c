"""Multilevel telescoping estimator with a per-level orthogonal transform.

Level ``l`` works on ``m**l``-dimensional normal vectors. One transformed
vector ``U^l X`` feeds both the fine functional and, after coarsening, the
coarse one; that coupling is what makes the level differences small.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .low_discrepancy import normal_samples

Batch = Callable[[np.ndarray], np.ndarray]

# rows per chunk are chosen so that a chunk holds about this many doubles
CHUNK_ELEMENTS = 1 << 20


def coarsen(x, m: int) -> np.ndarray:
    """Sum blocks of ``m`` consecutive coordinates and scale by ``1/sqrt(m)``."""
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[-1]
    if m < 1 or n % m:
        raise ValueError(f"length {n} is not divisible by m={m}")
    return x.reshape(x.shape[:-1] + (n // m, m)).sum(axis=-1) / np.sqrt(m)


@dataclass(frozen=True)
class LevelPlan:
    """Sample schedule ``N_l = N_L * factor**(L - l)`` on dimensions ``m**l``."""

    m: int
    L: int
    N_L: int
    factor: int = 2

    def __post_init__(self):
        if self.m < 2 or self.L < 0 or self.N_L < 1 or self.factor < 1:
            raise ValueError("need m >= 2, L >= 0, N_L >= 1, factor >= 1")

    def samples(self, level: int) -> int:
        return self.N_L * self.factor ** (self.L - level)

    def dimension(self, level: int) -> int:
        return self.m**level

    @property
    def schedule(self) -> list[int]:
        return [self.samples(l) for l in range(self.L + 1)]

    @property
    def levels(self) -> range:
        return range(self.L + 1)


@dataclass(frozen=True)
class LevelProblem:
    """Integrand of one telescoping term.

    The summand is ``payoff(fine(U x)) - payoff(coarse(U x))``, or just
    ``payoff(fine(U x))`` when ``coarse`` is None (level 0 or a single-level run).
    """

    dim: int
    fine: Batch
    payoff: Callable[[np.ndarray], np.ndarray]
    coarse: Batch | None = None
    transform: Batch | None = None

    def summand(self, x: np.ndarray) -> np.ndarray:
        y = self.transform(x) if self.transform is not None else x
        value = self.payoff(self.fine(y))
        if self.coarse is not None:
            value = value - self.payoff(self.coarse(y))
        return value


def level_mean(level: int, plan: LevelPlan, prob: LevelProblem, source) -> float:
    """Average of ``N_level`` summands driven by ``source``."""
    return sample_mean(prob, source, plan.samples(level))


def sample_mean(prob: LevelProblem, source, n: int) -> float:
    if source.dimension != prob.dim:
        raise ValueError(f"source dimension {source.dimension} != problem dimension {prob.dim}")
    rows = max(1, CHUNK_ELEMENTS // prob.dim)
    total = 0.0
    done = 0
    while done < n:
        k = min(rows, n - done)
        total += float(np.sum(prob.summand(normal_samples(source, k))))
        done += k
    return total / n


@dataclass
class EstimatorResult:
    value: float
    per_level_means: list[float]
    per_level_sample_counts: list[int]
    wall_time: float


def ml_estimate(plan: LevelPlan, problems: Sequence[LevelProblem], sources: Sequence) -> EstimatorResult:
    """Level-0 mean plus the sum of the level differences up to ``plan.L``."""
    if len(problems) != plan.L + 1 or len(sources) != plan.L + 1:
        raise ValueError(f"need {plan.L + 1} problems and sources, one per level")
    t0 = time.perf_counter()
    means = [level_mean(l, plan, problems[l], sources[l]) for l in plan.levels]
    return EstimatorResult(
        value=float(sum(means)),
        per_level_means=means,
        per_level_sample_counts=plan.schedule,
        wall_time=time.perf_counter() - t0,
    )
