"""Discretely monitored arithmetic Asian call under Black-Scholes."""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .mlevel import EstimatorResult, LevelProblem, coarsen
from .ortho import HouseholderChain, inverse_haar, pca_transform
from .regress import RegressionSpec, build_chain

METHODS = ("mc", "forward", "pca", "haar", "regression")


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class MarketParams:
    r: float = 0.04
    sigma: float = 0.3
    s0: float = 100.0

    def __post_init__(self):
        if not (self.sigma > 0 and self.s0 > 0):
            raise ConfigurationError("need sigma > 0 and s0 > 0")


@dataclass(frozen=True)
class OptionParams:
    K: float = 100.0
    T: float = 1.0

    def __post_init__(self):
        if not (self.K >= 0 and self.T > 0):
            raise ConfigurationError("need K >= 0 and T > 0")


@dataclass(frozen=True)
class AsianProblem:
    market: MarketParams = MarketParams()
    option: OptionParams = OptionParams()
    m: int = 2
    L: int = 10

    def dimension(self, level: int) -> int:
        return self.m**level


def average_price(x, market: MarketParams, option: OptionParams) -> np.ndarray:
    """Arithmetic mean of ``S_1..S_n`` for the path driven by normals ``x`` (last axis)."""
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[-1]
    if n < 1:
        raise ValueError("need at least one monitoring date")
    dt = option.T / n
    k = np.arange(1, n + 1)
    log_s = (
        np.log(market.s0)
        + (market.r - 0.5 * market.sigma**2) * dt * k
        + market.sigma * np.sqrt(dt) * np.cumsum(x, axis=-1)
    )
    with np.errstate(over="ignore"):
        avg = np.exp(log_s).mean(axis=-1)
    if not np.all(np.isfinite(avg)):
        raise OverflowError("average price overflowed")
    return avg


def payoff(avg, K: float):
    return np.maximum(np.asarray(avg) - K, 0.0)


def _suffix_sum(t: np.ndarray) -> np.ndarray:
    return np.cumsum(t[::-1])[::-1]


def fine_vector(level: int, market: MarketParams, option: OptionParams, m: int) -> np.ndarray:
    """``E(X_j h_1(X))`` for the level's own average, ``j = 1..m**level``."""
    if level < 0:
        raise ValueError("level must be non-negative")
    n = m**level
    k = np.arange(1, n + 1)
    terms = market.s0 * market.sigma / n * np.sqrt(option.T / n) * np.exp(market.r * k * option.T / n)
    return _suffix_sum(terms)


def coarse_vector(level: int, market: MarketParams, option: OptionParams, m: int) -> np.ndarray:
    """``E(X_j h_2(X))`` for the coarsened average; constant on blocks of ``m``."""
    if level < 1:
        raise ValueError("the coarse vector needs level >= 1")
    n = m**level
    nc = n // m
    k = np.arange(1, nc + 1)
    terms = market.s0 * market.sigma / nc * np.sqrt(option.T / n) * np.exp(market.r * k * option.T / nc)
    return np.repeat(_suffix_sum(terms), m)


@functools.lru_cache(maxsize=256)
def regression_chain(level: int, market: MarketParams, option: OptionParams, m: int,
                     coupled: bool = True) -> HouseholderChain:
    """Chain built from ``{a_1, a_2}`` (or ``{a_1}`` at level 0 / when uncoupled)."""
    vecs = [fine_vector(level, market, option, m)]
    if coupled and level >= 1:
        vecs.append(coarse_vector(level, market, option, m))
    return build_chain(RegressionSpec(np.vstack(vecs)))


def transform_for(method: str, level: int, problem: AsianProblem, coupled: bool = True):
    """Orthogonal map applied to the level's normal vectors; None means identity."""
    if method not in METHODS:
        raise ConfigurationError(f"unknown method {method!r}; choose from {METHODS}")
    if method in ("mc", "forward"):
        return None
    if method == "pca":
        return pca_transform
    if method == "haar":
        if problem.m != 2:
            raise ConfigurationError("the Haar transform needs m = 2")
        return inverse_haar
    chain = regression_chain(level, problem.market, problem.option, problem.m, coupled)
    return chain if len(chain) else None


def build_level_problem(level: int, problem: AsianProblem, method: str) -> LevelProblem:
    """Telescoping term ``level`` of the multilevel estimator."""
    if not 0 <= level <= problem.L:
        raise ValueError(f"level {level} outside 0..{problem.L}")
    mk, op, m = problem.market, problem.option, problem.m

    def fine(y):
        return average_price(y, mk, op)

    def coarse(y):
        return average_price(coarsen(y, m), mk, op)

    def pay(avg):
        return payoff(avg, op.K)

    return LevelProblem(
        dim=problem.dimension(level),
        fine=fine,
        payoff=pay,
        coarse=coarse if level >= 1 else None,
        transform=transform_for(method, level, problem),
    )


def build_single_level_problem(problem: AsianProblem, method: str, level: int | None = None) -> LevelProblem:
    """Plain (non-telescoped) integrand ``f^level`` on ``m**level`` dimensions."""
    level = problem.L if level is None else level
    mk, op = problem.market, problem.option
    return LevelProblem(
        dim=problem.dimension(level),
        fine=lambda y: average_price(y, mk, op),
        payoff=lambda avg: payoff(avg, op.K),
        transform=transform_for(method, level, problem, coupled=False),
    )


def discounted_price(result: EstimatorResult | float, market: MarketParams, option: OptionParams) -> float:
    value = result.value if isinstance(result, EstimatorResult) else float(result)
    return float(np.exp(-market.r * option.T) * value)
