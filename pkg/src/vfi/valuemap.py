"""Gridded objective functions and the marginal optimization map.

An objective f(u, x) is stored exactly as, for each grid point x, a finite
set of candidate arguments u with their objective values.  For objectives
built from step functions the candidate set is exhaustive, so taking the
per-x maximum ("psi") is exact rather than a discretization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Grid", "GriddedObjective", "ValueFunction", "psi", "negate"]


@dataclass(frozen=True)
class Grid:
    """Strictly increasing finite grid of x-values with a nominal spacing."""

    points: np.ndarray
    step: float

    def __post_init__(self):
        p = np.asarray(self.points, dtype=float)
        if p.size < 2:
            raise ValueError("grid needs at least 2 points")
        if not np.all(np.isfinite(p)) or not np.all(np.diff(p) > 0):
            raise ValueError("grid points must be finite and strictly increasing")
        if not (self.step > 0):
            raise ValueError("grid step must be positive")
        object.__setattr__(self, "points", p)

    def __len__(self) -> int:
        return self.points.size

    @property
    def extent(self) -> float:
        return float(self.points[-1] - self.points[0])

    def rect_weights(self) -> np.ndarray:
        """Left-rectangle integration weights; the last point gets ``step``."""
        d = np.diff(self.points)
        return np.concatenate((d, [self.step]))

    def same_as(self, other: "Grid") -> bool:
        return (
            len(self) == len(other)
            and np.array_equal(self.points, other.points)
        )


@dataclass(frozen=True)
class GriddedObjective:
    """Objective f(u, x) as a (grid, candidates) matrix.

    ``values[k, c]`` is f at candidate c of grid point k; ``u`` holds the
    candidate arguments (may be None when candidates are purely positional);
    ``valid`` masks padding for ragged candidate sets (None means all valid).
    """

    grid: Grid
    values: np.ndarray
    u: np.ndarray | None = None
    valid: np.ndarray | None = None
    tag: str = "user"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != len(self.grid):
            raise ValueError("values must be (n_grid, n_candidates)")
        object.__setattr__(self, "values", v)
        if self.valid is not None:
            m = np.asarray(self.valid, dtype=bool)
            if m.shape != v.shape:
                raise ValueError("valid mask shape mismatch")
            object.__setattr__(self, "valid", m)
        bad = ~np.isfinite(v)
        if self.valid is not None:
            bad &= self.valid
        if np.any(bad):
            raise ValueError("candidate values must be finite")

    @classmethod
    def from_candidates(cls, grid: Grid, candidates, tag: str = "user") -> "GriddedObjective":
        """Build from a per-grid-point list of (u, value) pairs (ragged)."""
        if len(candidates) != len(grid):
            raise ValueError("need one candidate list per grid point")
        width = max((len(c) for c in candidates), default=0)
        if width == 0 or any(len(c) == 0 for c in candidates):
            k = next(i for i, c in enumerate(candidates) if len(c) == 0)
            raise ValueError(f"empty candidate set at grid point x={float(grid.points[k])!r}")
        values = np.full((len(grid), width), -np.inf)
        us = np.full((len(grid), width), np.nan)
        valid = np.zeros((len(grid), width), dtype=bool)
        for k, cand in enumerate(candidates):
            for c, (u, val) in enumerate(cand):
                us[k, c] = u
                values[k, c] = val
                valid[k, c] = True
        values[~valid] = 0.0  # placeholder, masked out
        return cls(grid=grid, values=values, u=us, valid=valid, tag=tag)

    def masked_values(self, fill: float) -> np.ndarray:
        if self.valid is None:
            return self.values
        return np.where(self.valid, self.values, fill)

    def row_max(self) -> np.ndarray:
        return self.masked_values(-np.inf).max(axis=1)


@dataclass(frozen=True)
class ValueFunction:
    """psi(f) sampled on a grid, with an argmax witness per grid point."""

    grid: Grid
    values: np.ndarray
    argmax_witness: np.ndarray | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (len(self.grid),):
            raise ValueError("values must have one entry per grid point")
        object.__setattr__(self, "values", v)


def psi(f: GriddedObjective) -> ValueFunction:
    """Marginal maximization: per grid point, the exact candidate maximum."""
    if f.valid is not None and not f.valid.any(axis=1).all():
        k = int(np.flatnonzero(~f.valid.any(axis=1))[0])
        raise ValueError(f"empty candidate set at grid point x={float(f.grid.points[k])!r}")
    vals = f.masked_values(-np.inf)
    witness = vals.argmax(axis=1)
    return ValueFunction(grid=f.grid, values=vals.max(axis=1), argmax_witness=witness)


def negate(f: GriddedObjective) -> GriddedObjective:
    """Pointwise negation of candidate values; inf f = -psi(negate(f))."""
    return GriddedObjective(
        grid=f.grid, values=-f.values, u=f.u, valid=f.valid, tag=f.tag
    )
