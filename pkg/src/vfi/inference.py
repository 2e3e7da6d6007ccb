"""User-facing procedures: uniform bands for the bound functions, the
combined CDF band, the dominance test, and the constant-effect diagnostic.

All bootstrap directions are evaluated on the fixed candidate structure of
the plug-in objective, so every replicate reuses the same precomputed
searchsorted indices and only the cumulative weight arrays change.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bootstrap import BootstrapConfig, BootstrapRun, bootstrap_statistic_distribution
from .derivative import ArgmaxSets, Tuning, dominance_derivative_estimate, eps_argmax
from .empirical import Sample, StepCDF, ecdf_build
from .makarov import (
    MakarovStructure,
    SupportInfo,
    default_grid,
    lower_bound,
    support_bounds,
    upper_bound,
)
from .stats import StatKind, dominance_stat, ks_band_stat
from .valuemap import Grid, ValueFunction
from . import derivative as _deriv

__all__ = [
    "Band",
    "TestResult",
    "uniform_band",
    "cdf_band",
    "dominance_test",
    "constant_effect_check",
]


@dataclass(frozen=True)
class Band:
    grid: Grid
    lo: np.ndarray
    hi: np.ndarray
    center: np.ndarray
    alpha: float
    c_star: float
    r_n: float
    run: BootstrapRun | None = None

    def __post_init__(self):
        if np.any(self.lo > self.center + 1e-12) or np.any(self.center > self.hi + 1e-12):
            raise ValueError("band limits must bracket the center")


@dataclass(frozen=True)
class TestResult:
    statistic: float
    critical_value: float
    reject: bool
    alpha: float
    rep_count: int
    rep_mean: float
    rep_max: float
    run: BootstrapRun | None = None


def _block_starts(sample: Sample) -> np.ndarray:
    return np.unique(sample.sorted_values, return_index=True)[1]


def _cum_from_weights(w: np.ndarray, starts: np.ndarray, n: int) -> np.ndarray:
    """Cumulative mass array (leading zero) of the reweighted sample, on
    the same unique-value blocks as the plug-in ECDF."""
    mass = np.add.reduceat(w, starts)
    return np.concatenate(([0.0], np.cumsum(mass) / n))


class _BandProblem:
    """Bootstrap problem for one bound function's sup-norm statistic."""

    def __init__(self, X1: Sample, X0: Sample, structure: MakarovStructure,
                 sets: ArgmaxSets, sign: float, r_n: float):
        self.sample_sizes = [len(X1), len(X0)]
        self.structure = structure
        self.sets = sets
        self.sign = sign
        self.r_n = r_n
        self.base = structure.base_values()
        self.starts1 = _block_starts(X1)
        self.starts0 = _block_starts(X0)
        self.kind = StatKind(j=1)

    def replicate_stat(self, ws) -> float:
        w1, w0 = ws
        d1 = _cum_from_weights(w1, self.starts1, self.sample_sizes[0])
        d0 = _cum_from_weights(w0, self.starts0, self.sample_sizes[1])
        h = self.sign * self.r_n * (self.structure.evaluate(d1, d0) - self.base)
        return _deriv.derivative_estimate(self.kind, self.sets, h)


def uniform_band(which: str, X1: Sample, X0: Sample, alpha: float = 0.05,
                 config: BootstrapConfig | None = None, grid: Grid | None = None,
                 step: float | None = None, tuning: Tuning | None = None) -> Band:
    """Uniform confidence band for the lower or upper bound function.

    The band is the plug-in bound plus/minus c*/r_n, where c* estimates the
    (1 - alpha) quantile of the sup-norm limit via the bootstrap with the
    derivative estimator for the two-sided sup statistic.
    """
    if which not in ("lower", "upper"):
        raise ValueError(f"band target must be 'lower' or 'upper', got {which!r}")
    config = config or BootstrapConfig(alpha=alpha)
    if config.alpha != alpha:
        config = BootstrapConfig(R=config.R, scheme=config.scheme, seed=config.seed,
                                 alpha=alpha, threads=config.threads)
    tuning = tuning or Tuning(n=len(X1) + len(X0))
    F1, F0 = ecdf_build(X1), ecdf_build(X0)
    if grid is None:
        grid = default_grid(support_bounds(X1, X0), step)
    structure = MakarovStructure(F1, F0, grid)
    obj = structure.objective(which)
    # centers come from the direct bound evaluation so `bounds` output and
    # band centers are bit-identical
    if which == "lower":
        center = lower_bound(F1, F0, grid).values
    else:
        center = upper_bound(F1, F0, grid).values
    sets = eps_argmax(obj, tuning)
    sign = 1.0 if which == "lower" else -1.0
    problem = _BandProblem(X1, X0, structure, sets, sign, tuning.r_n)
    run = bootstrap_statistic_distribution(problem, config)
    half = run.critical_value / tuning.r_n
    return Band(
        grid=grid,
        lo=np.maximum(center - half, 0.0),
        hi=np.minimum(center + half, 1.0),
        center=center,
        alpha=alpha,
        c_star=run.critical_value,
        r_n=tuning.r_n,
        run=run,
    )


def cdf_band(lower_band: Band, upper_band: Band) -> Band:
    """Conservative band for the effect CDF from two bound bands at level
    alpha/2 each: lower limit of the lower-bound band, upper limit of the
    upper-bound band, re-monotonized since clipping can break monotonicity."""
    if not lower_band.grid.same_as(upper_band.grid):
        raise ValueError("bands live on different grids")
    if lower_band.alpha != upper_band.alpha:
        raise ValueError("bands must share the same level")
    lo = np.maximum.accumulate(lower_band.lo)
    hi = np.minimum.accumulate(upper_band.hi[::-1])[::-1]
    return Band(
        grid=lower_band.grid,
        lo=lo,
        hi=hi,
        center=0.5 * (lower_band.center + upper_band.center),
        alpha=2.0 * lower_band.alpha,
        c_star=max(lower_band.c_star, upper_band.c_star),
        r_n=lower_band.r_n,
    )


def _merge_support(a: SupportInfo, b: SupportInfo) -> SupportInfo:
    lo = min(a.global_range[0], b.global_range[0])
    hi = max(a.global_range[1], b.global_range[1])
    return SupportInfo(lower_support=(lo, hi), upper_support=(lo, hi), global_range=(lo, hi))


class _DominanceProblem:
    """Bootstrap problem for the one-sided L2 dominance statistic; the
    control sample's weights are shared between both bound structures."""

    def __init__(self, X0, XA, XB, sA: MakarovStructure, sB: MakarovStructure,
                 setsA, setsB, contact, signA, signB, integrand_sign, r_n):
        self.sample_sizes = [len(X0), len(XA), len(XB)]
        self.sA, self.sB = sA, sB
        self.setsA, self.setsB = setsA, setsB
        self.contact = contact
        self.signA, self.signB = signA, signB
        self.integrand_sign = integrand_sign
        self.r_n = r_n
        self.baseA = sA.base_values()
        self.baseB = sB.base_values()
        self.starts0 = _block_starts(X0)
        self.startsA = _block_starts(XA)
        self.startsB = _block_starts(XB)

    def replicate_stat(self, ws) -> float:
        w0, wA, wB = ws
        n0, nA, nB = self.sample_sizes
        d0 = _cum_from_weights(w0, self.starts0, n0)
        dA = _cum_from_weights(wA, self.startsA, nA)
        dB = _cum_from_weights(wB, self.startsB, nB)
        hA = self.signA * self.r_n * (self.sA.evaluate(dA, d0) - self.baseA)
        hB = self.signB * self.r_n * (self.sB.evaluate(dB, d0) - self.baseB)
        return dominance_derivative_estimate(
            self.setsA, self.setsB, self.contact, hA, hB, sign=self.integrand_sign
        )


def dominance_test(X0: Sample, XA: Sample, XB: Sample, alpha: float = 0.05,
                   config: BootstrapConfig | None = None, grid: Grid | None = None,
                   step: float | None = None, tuning: Tuning | None = None,
                   orientation: str = "necessary") -> TestResult:
    """Bootstrap test of distributional dominance of treatment A over B
    against a common control.

    orientation 'necessary' tests the refutable implication L_A <= U_B;
    'sufficient' tests U_A <= L_B, whose failure leaves dominance
    undetermined but which is the breakdown-frontier quantity.
    """
    if orientation not in ("necessary", "sufficient"):
        raise ValueError(f"unknown orientation {orientation!r}")
    config = config or BootstrapConfig(alpha=alpha)
    if config.alpha != alpha:
        config = BootstrapConfig(R=config.R, scheme=config.scheme, seed=config.seed,
                                 alpha=alpha, threads=config.threads)
    tuning = tuning or Tuning(n=len(X0) + len(XA) + len(XB))
    F0, FA, FB = ecdf_build(X0), ecdf_build(XA), ecdf_build(XB)
    if grid is None:
        grid = default_grid(
            _merge_support(support_bounds(XA, X0), support_bounds(XB, X0)), step
        )
    if orientation == "necessary":
        orientA, orientB, integrand_sign = "lower", "upper", 1.0
    else:
        orientA, orientB, integrand_sign = "upper", "lower", -1.0
    sA = MakarovStructure(FA, F0, grid)
    sB = MakarovStructure(FB, F0, grid)
    objA = sA.objective(orientA)
    objB = sB.objective(orientB)
    if orientation == "necessary":
        lv = lower_bound(FA, F0, grid).values  # L_A
        rv = upper_bound(FB, F0, grid).values  # U_B
    else:
        lv = upper_bound(FA, F0, grid).values  # U_A
        rv = lower_bound(FB, F0, grid).values  # L_B
    gap = lv - rv
    left = ValueFunction(grid=grid, values=lv)
    right = ValueFunction(grid=grid, values=rv)
    stat = dominance_stat(left, right, tuning.r_n)
    contact = np.abs(gap) <= tuning.b_n
    setsA = eps_argmax(objA, tuning)
    setsB = eps_argmax(objB, tuning)
    signA = 1.0 if orientA == "lower" else -1.0
    signB = 1.0 if orientB == "lower" else -1.0
    problem = _DominanceProblem(X0, XA, XB, sA, sB, setsA, setsB, contact,
                                signA, signB, integrand_sign, tuning.r_n)
    run = bootstrap_statistic_distribution(problem, config)
    reps = run.replicates
    return TestResult(
        statistic=stat.value,
        critical_value=run.critical_value,
        reject=stat.value > run.critical_value,
        alpha=alpha,
        rep_count=reps.size,
        rep_mean=float(reps.mean()),
        rep_max=float(reps.max()),
        run=run,
    )


def constant_effect_check(band: Band, x_star: float) -> bool:
    """Whether a constant effect of size x_star is consistent with the
    band, i.e. the step CDF I(x >= x_star) fits inside it everywhere."""
    pts = band.grid.points
    if not (pts[0] <= x_star <= pts[-1]):
        raise ValueError(f"x_star={x_star!r} outside grid extent")
    step_fn = (pts >= x_star).astype(float)
    return bool(np.all(band.lo <= step_fn) and np.all(step_fn <= band.hi))
