"""Plug-in directional-derivative estimators for the lambda statistics.

The derivative of each statistic at the estimated objective is a max or an
L_p aggregate of the direction h restricted to estimated near-argmax sets.
Three estimated sets drive everything: per-x eps-argmax candidates (slack
a_n), the joint near-maximizer set, and the contact region where the value
function is within b_n of zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .stats import StatKind
from .valuemap import Grid, GriddedObjective, psi

__all__ = [
    "Tuning",
    "ArgmaxSets",
    "eps_argmax",
    "derivative_estimate",
    "dominance_derivative_estimate",
]

MIN_COMBINED_N = 16


@dataclass(frozen=True)
class Tuning:
    """Slack and rate constants derived from the combined sample size."""

    n: int
    a_const: float = 0.2
    b_const: float = 3.0

    def __post_init__(self):
        # log(log(n)) must be safely positive
        if self.n < MIN_COMBINED_N:
            raise ValueError(f"combined sample size {self.n} below minimum {MIN_COMBINED_N}")
        if not (self.a_const > 0 and self.b_const > 0):
            raise ValueError("tuning constants must be positive")

    @property
    def r_n(self) -> float:
        return float(np.sqrt(self.n))

    @property
    def a_n(self) -> float:
        return self.a_const * float(np.log(np.log(self.n))) / self.r_n

    @property
    def b_n(self) -> float:
        return self.b_const * float(np.log(np.log(self.n))) / self.r_n


@dataclass(frozen=True)
class ArgmaxSets:
    """Estimated argmax structure of an objective, as boolean masks.

    per_x[k, c]: candidate c is within a_n of the row maximum at grid k.
    joint[k, c]: within a_n of the global maximum.
    contact[k]: |value function| <= b_n, with an all-True fallback when the
    threshold captures nothing.
    """

    grid: Grid
    per_x: np.ndarray
    joint: np.ndarray
    contact: np.ndarray
    contact_fallback: bool = False

    def __post_init__(self):
        if not self.per_x.any(axis=1).all():
            raise ValueError("per-x argmax sets must be nonempty")
        if not self.joint.any():
            raise ValueError("joint argmax set must be nonempty")
        if not self.contact.any():
            raise ValueError("contact set must be nonempty after fallback")


def eps_argmax(f: GriddedObjective, tuning: Tuning) -> ArgmaxSets:
    vals = f.masked_values(-np.inf)
    row_max = vals.max(axis=1, keepdims=True)
    per_x = vals >= row_max - tuning.a_n
    joint = vals >= vals.max() - tuning.a_n
    contact = np.abs(psi(f).values) <= tuning.b_n
    fallback = not contact.any()
    if fallback:
        contact = np.ones(len(f.grid), dtype=bool)
    return ArgmaxSets(
        grid=f.grid, per_x=per_x, joint=joint, contact=contact, contact_fallback=fallback
    )


def _direction_values(h, sets: ArgmaxSets) -> np.ndarray:
    hv = h.values if isinstance(h, GriddedObjective) else np.asarray(h, dtype=float)
    if hv.shape != sets.per_x.shape:
        raise ValueError("direction does not share the objective's candidate structure")
    return hv


def _row_sup(hv: np.ndarray, mask: np.ndarray) -> np.ndarray:
    return np.where(mask, hv, -np.inf).max(axis=1)


def derivative_estimate(kind: StatKind, sets: ArgmaxSets, h) -> float:
    """Directional-derivative value of lambda_j at the objective, in
    direction h, using the estimated argmax sets."""
    hv = _direction_values(h, sets)
    row = _row_sup(hv, sets.per_x)
    if kind.j == 1:
        # second branch: sup_x inf over the per-x set of (-h)
        return float(max(row.max(), -row.min()))
    if kind.j == 2:
        return float(max(np.where(sets.joint, hv, -np.inf).max(), 0.0))
    w = sets.grid.rect_weights()
    if kind.j == 3:
        return float(np.sum(np.abs(row) ** kind.p * w) ** (1.0 / kind.p))
    pos = np.maximum(row, 0.0)
    return float(np.sum(pos[sets.contact] ** kind.p * w[sets.contact]) ** (1.0 / kind.p))


def dominance_derivative_estimate(
    setsA: ArgmaxSets,
    setsB: ArgmaxSets,
    contact: np.ndarray,
    hA,
    hB,
    sign: float = 1.0,
) -> float:
    """Derivative of the one-sided L2 dominance statistic.

    hA is the direction on the lower-bound objective of the A-vs-control
    pair; hB the direction on the (negated) upper-bound objective of the
    B-vs-control pair.  ``contact`` restricts integration to the estimated
    region where the population gap is zero.  ``sign`` flips the integrand
    for the reversed orientation of the test.
    """
    if not setsA.grid.same_as(setsB.grid):
        raise ValueError("argmax sets live on different grids")
    contact = np.asarray(contact, dtype=bool)
    if not contact.any():
        contact = np.ones(len(setsA.grid), dtype=bool)
    rowA = _row_sup(_direction_values(hA, setsA), setsA.per_x)
    rowB = _row_sup(_direction_values(hB, setsB), setsB.per_x)
    integrand = np.maximum(sign * (rowA + rowB), 0.0)
    w = setsA.grid.rect_weights()
    return float(np.sqrt(np.sum(integrand[contact] ** 2 * w[contact])))
