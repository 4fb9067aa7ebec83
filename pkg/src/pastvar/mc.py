"""Monte Carlo estimators used as an independent check on quadrature.

Past-lifetime samples are drawn exactly: ``U ~ Uniform(0, F(t))`` and
``X = Q(U)``, so no draw is rejected. Each batch has its own child seed
spawned from ``MCConfig.seed``; batches are combined in index order, so the
result does not depend on how many threads run them.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .distributions import Distribution
from .exceptions import DomainError
from .measures import PastContext

__all__ = [
    "RNG_ALGORITHM",
    "MCConfig",
    "MCEstimate",
    "mc_past_entropy",
    "mc_past_varentropy",
    "mc_inactivity_moments",
    "sample_past_lifetime",
    "sample_parallel_system",
    "ks_distance",
]

RNG_ALGORITHM = "numpy.random.PCG64 with SeedSequence.spawn per batch"
MIN_SAMPLES = 1000


@dataclass(frozen=True)
class MCConfig:
    n_samples: int = 1_000_000
    seed: int = 20240101
    batch: int = 250_000
    workers: int = 1

    def __post_init__(self):
        if self.n_samples < MIN_SAMPLES:
            raise ValueError(f"n_samples must be >= {MIN_SAMPLES}")
        if self.batch < 1 or self.workers < 1:
            raise ValueError("batch and workers must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def batch_sizes(self) -> list[int]:
        full, rest = divmod(self.n_samples, self.batch)
        return [self.batch] * full + ([rest] if rest else [])


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    std_error: float
    n_effective: int

    def z_score(self, reference: float) -> float:
        if self.std_error == 0:
            close = abs(self.mean - reference) <= 1e-12 * max(1.0, abs(reference))
            return 0.0 if close else math.inf
        return (self.mean - reference) / self.std_error


def _batched(draw, cfg: MCConfig) -> np.ndarray:
    sizes = cfg.batch_sizes()
    children = np.random.SeedSequence(cfg.seed).spawn(len(sizes))

    def run(i):
        return draw(np.random.Generator(np.random.PCG64(children[i])), sizes[i])

    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(i) for i in range(len(sizes))]
    return np.concatenate(parts)


def sample_past_lifetime(dist: Distribution, t: float, cfg: MCConfig) -> np.ndarray:
    """Exact draws from ``X | X <= t``."""
    mass = PastContext(dist, t).mass

    def draw(rng, n):
        return np.asarray(dist.quantile(rng.uniform(0.0, mass, n)), dtype=float)

    return _batched(draw, cfg)


def sample_parallel_system(dist: Distribution, n_units: int, cfg: MCConfig) -> np.ndarray:
    """Lifetimes ``max(X_1, ..., X_n)`` of a parallel system of iid units."""

    def draw(rng, n):
        u = rng.uniform(0.0, 1.0, (n, n_units))
        return np.asarray(dist.quantile(u), dtype=float).max(axis=1)

    return _batched(draw, cfg)


def _mean_estimate(values: np.ndarray) -> MCEstimate:
    n = values.size
    if n < MIN_SAMPLES:
        raise DomainError(f"only {n} effective samples")
    return MCEstimate(float(values.mean()), float(values.std(ddof=1) / math.sqrt(n)), n)


def _variance_estimate(values: np.ndarray) -> MCEstimate:
    n = values.size
    if n < MIN_SAMPLES:
        raise DomainError(f"only {n} effective samples")
    shifted = values - values[0]
    sq = (shifted - shifted.mean()) ** 2
    return MCEstimate(float(sq.sum() / (n - 1)), float(sq.std(ddof=1) / math.sqrt(n)), n)


def _information(dist, t, cfg):
    x = sample_past_lifetime(dist, t, cfg)
    mass = float(dist.cdf(t))
    return -np.log(np.asarray(dist.pdf(x), dtype=float) / mass)


def mc_past_entropy(dist: Distribution, t: float, cfg: MCConfig | None = None) -> MCEstimate:
    """Sample mean of ``-log(f(X)/F(t))`` over draws of ``X | X <= t``."""
    return _mean_estimate(_information(dist, t, cfg or MCConfig()))


def mc_past_varentropy(dist: Distribution, t: float, cfg: MCConfig | None = None) -> MCEstimate:
    """Sample variance of ``-log(f(X)/F(t))`` over draws of ``X | X <= t``.

    The standard error is that of the mean of squared deviations.
    """
    return _variance_estimate(_information(dist, t, cfg or MCConfig()))


def mc_inactivity_moments(dist: Distribution, t: float,
                          cfg: MCConfig | None = None) -> tuple[MCEstimate, MCEstimate]:
    """Mean and variance of ``t - X`` given ``X <= t``."""
    idle = t - sample_past_lifetime(dist, t, cfg or MCConfig())
    return _mean_estimate(idle), _variance_estimate(idle)


def ks_distance(samples, cdf) -> float:
    """Kolmogorov distance between the empirical cdf of ``samples`` and ``cdf``."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    model = np.asarray(cdf(x), dtype=float)
    upper = np.arange(1, n + 1) / n - model
    lower = model - np.arange(n) / n
    return float(max(upper.max(), lower.max()))
