"""Monte Carlo experiments producing power curves for the two procedures.

Two designs: a normal location family testing the lower-bound function
against its known closed form, and a uniform three-sample design for the
dominance test where the local parameter walks across the breakdown point.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from .bootstrap import BootstrapConfig, _mix, stream
from .empirical import Sample
from .inference import dominance_test, uniform_band
from .stats import ks_band_stat
from .valuemap import ValueFunction

__all__ = ["ExperimentConfig", "PowerCurve", "run_normal_location", "run_uniform_dominance"]

KINDS = ("normal_location", "uniform_dominance")


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    n: int = 100
    R: int = 199
    reps: int = 300
    deltas: tuple = (-5.0, -2.5, 0.0, 2.5, 5.0)
    alpha: float = 0.05
    seed: int = 0
    grid_step: float | None = None
    scheme: str = "multinomial"
    threads: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.n < 16:
            raise ValueError("per-sample n must be at least 16")
        if self.reps < 1:
            raise ValueError("need at least one Monte Carlo repetition")
        if len(self.deltas) == 0:
            raise ValueError("delta grid must be nonempty")

    def step(self) -> float:
        if self.grid_step is not None:
            return self.grid_step
        return 0.02 if self.kind == "uniform_dominance" else 0.05


@dataclass(frozen=True)
class PowerCurve:
    deltas: np.ndarray
    reject_rate: np.ndarray
    se: np.ndarray
    config: ExperimentConfig = field(repr=False, default=None)


def _normal_lower_bound(x: np.ndarray) -> np.ndarray:
    # closed form of the lower bound when both marginals are standard normal
    return np.maximum(2.0 * norm.cdf(x / 2.0) - 1.0, 0.0)


def _collect(config: ExperimentConfig, one_rep) -> PowerCurve:
    deltas = np.asarray(config.deltas, dtype=float)
    rates = np.empty(deltas.size)
    jobs = [(i, m) for i in range(deltas.size) for m in range(config.reps)]

    def run(job):
        i, m = job
        return i, one_rep(deltas[i], i, m)

    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]
    for i in range(deltas.size):
        hits = sum(r for idx, r in results if idx == i)
        rates[i] = hits / config.reps
    se = np.sqrt(rates * (1.0 - rates) / config.reps)
    return PowerCurve(deltas=deltas, reject_rate=rates, se=se, config=config)


def run_normal_location(config: ExperimentConfig) -> PowerCurve:
    """Size and power of the band-based test of the lower bound against
    the two-standard-normal closed form, under mean shifts delta/sqrt(n)."""
    if config.kind != "normal_location":
        raise ValueError("config kind mismatch")
    n, alpha = config.n, config.alpha

    def one_rep(delta: float, i: int, m: int) -> bool:
        rng = stream(config.seed, 7001, i, m)
        X0 = Sample(rng.normal(0.0, 1.0, n), label="control")
        X1 = Sample(rng.normal(delta / np.sqrt(n), 1.0, n), label="treated")
        bconf = BootstrapConfig(R=config.R, scheme=config.scheme,
                                seed=_mix(_mix(config.seed) ^ _mix(7001 * 100_000 + i * 10_000 + m)),
                                alpha=alpha, threads=1)
        band = uniform_band("lower", X1, X0, alpha=alpha, config=bconf, step=config.step())
        L0 = ValueFunction(grid=band.grid, values=_normal_lower_bound(band.grid.points))
        stat = ks_band_stat(ValueFunction(grid=band.grid, values=band.center), L0, band.r_n)
        return stat.value > band.c_star

    return _collect(config, one_rep)


def run_uniform_dominance(config: ExperimentConfig) -> PowerCurve:
    """Rejection rates of the dominance test in the uniform design where
    treatment A sits at mu = 1 + delta/sqrt(n); delta = 0 is the boundary."""
    if config.kind != "uniform_dominance":
        raise ValueError("config kind mismatch")
    n, alpha = config.n, config.alpha

    def one_rep(delta: float, i: int, m: int) -> bool:
        mu = 1.0 + delta / np.sqrt(n)
        rng = stream(config.seed, 7002, i, m)
        X0 = Sample(rng.uniform(0.0, 1.0, n), label="control")
        XB = Sample(rng.uniform(0.0, 1.0, n), label="B")
        XA = Sample(rng.uniform(mu, mu + 1.0, n), label="A")
        bconf = BootstrapConfig(R=config.R, scheme=config.scheme,
                                seed=_mix(_mix(config.seed) ^ _mix(7002 * 100_000 + i * 10_000 + m)),
                                alpha=alpha, threads=1)
        res = dominance_test(X0, XA, XB, alpha=alpha, config=bconf,
                             step=config.step(), orientation="sufficient")
        return res.reject

    return _collect(config, one_rep)
