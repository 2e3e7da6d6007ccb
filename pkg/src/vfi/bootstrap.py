"""Exchangeable bootstrap with deterministic per-replicate RNG streams.

Replicate r of sample s always uses the counter-based stream keyed by
(seed, s, r), so results are bit-identical regardless of execution order
or worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .empirical import Sample, StepCDF, weighted_ecdf

__all__ = [
    "BootstrapConfig",
    "BootstrapRun",
    "stream",
    "draw_weights",
    "resample_ecdf",
    "critical_value",
    "bootstrap_statistic_distribution",
]

SCHEMES = ("multinomial", "bayesian")


@dataclass(frozen=True)
class BootstrapConfig:
    R: int = 199
    scheme: str = "multinomial"
    seed: int = 0
    alpha: float = 0.05
    threads: int = 1

    def __post_init__(self):
        if self.R < 1:
            raise ValueError("replicate count must be at least 1")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown weight scheme {self.scheme!r}")
        if not (0.0 < self.alpha < 1.0):
            raise ValueError("alpha must lie in (0, 1)")
        if self.threads < 1:
            raise ValueError("thread count must be at least 1")


@dataclass(frozen=True)
class BootstrapRun:
    replicates: np.ndarray
    critical_value: float
    config: BootstrapConfig
    stream_ids: tuple = field(default=())

    @property
    def R(self) -> int:
        return self.replicates.size


def _mix(z: int) -> int:
    """splitmix64 finalizer; spreads structured ids over 64 bits."""
    z = (z + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31)


def stream(seed: int, *ids: int) -> np.random.Generator:
    """Independent counter-based stream keyed by (seed, *ids)."""
    k = _mix(seed & 0xFFFFFFFFFFFFFFFF)
    for i in ids:
        k = _mix(k ^ _mix(i & 0xFFFFFFFFFFFFFFFF))
    key = (k, _mix(k))
    return np.random.Generator(np.random.Philox(key=key))


def draw_weights(n: int, scheme: str, rng: np.random.Generator) -> np.ndarray:
    if n < 1:
        raise ValueError("cannot draw weights for an empty sample")
    if scheme == "multinomial":
        return rng.multinomial(n, np.full(n, 1.0 / n)).astype(float)
    if scheme == "bayesian":
        e = rng.standard_exponential(n)
        return e * (n / e.sum())
    raise ValueError(f"unknown weight scheme {scheme!r}")


def resample_ecdf(sample: Sample, weights: np.ndarray) -> StepCDF:
    if len(weights) != len(sample):
        raise ValueError("weights length must match sample size")
    return weighted_ecdf(sample.values, weights)


def critical_value(replicates: np.ndarray, alpha: float) -> float:
    """Order statistic ceil((1 - alpha) * (R + 1)) of the replicates,
    1-based and capped at R."""
    reps = np.sort(np.asarray(replicates, dtype=float))
    if reps.size == 0:
        raise ValueError("no bootstrap replicates")
    k = int(np.ceil((1.0 - alpha) * (reps.size + 1)))
    k = min(max(k, 1), reps.size)
    return float(reps[k - 1])


def bootstrap_statistic_distribution(problem, config: BootstrapConfig) -> BootstrapRun:
    """Evaluate the replicate statistic over R independent weight draws.

    ``problem`` exposes ``sample_sizes`` (one entry per underlying sample)
    and ``replicate_stat(weights_list) -> float`` evaluating the derivative
    estimator at the bootstrap direction built from those weights.
    """
    sizes = list(problem.sample_sizes)

    def one(r: int) -> float:
        ws = [
            draw_weights(n, config.scheme, stream(config.seed, s, r))
            for s, n in enumerate(sizes)
        ]
        return problem.replicate_stat(ws)

    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            reps = np.fromiter(pool.map(one, range(config.R)), dtype=float, count=config.R)
    else:
        reps = np.fromiter((one(r) for r in range(config.R)), dtype=float, count=config.R)
    return BootstrapRun(
        replicates=reps,
        critical_value=critical_value(reps, config.alpha),
        config=config,
        stream_ids=tuple(range(len(sizes))),
    )
