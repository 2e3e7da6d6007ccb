"""Empirical distribution and quantile functions for one-dimensional samples.

Everything downstream (bound functions, bootstrap directions) is built from
right-continuous step CDFs, so exact evaluation at jump points and left
limits matters more than speed here.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "Sample",
    "StepCDF",
    "ecdf_build",
    "ecdf_eval",
    "ecdf_left_limit",
    "quantile",
    "weighted_ecdf",
    "load_sample_csv",
]


@dataclass(frozen=True)
class Sample:
    """A finite sample of real outcomes with an optional label."""

    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1:
            raise ValueError("sample values must be one-dimensional")
        if v.size == 0:
            raise ValueError("empty sample")
        if not np.all(np.isfinite(v)):
            raise ValueError(f"sample {self.label!r} contains non-finite values")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "_sorted", np.sort(v))

    def __len__(self) -> int:
        return self.values.size

    @property
    def sorted_values(self) -> np.ndarray:
        return self._sorted

    @property
    def min(self) -> float:
        return float(self._sorted[0])

    @property
    def max(self) -> float:
        return float(self._sorted[-1])


@dataclass(frozen=True)
class StepCDF:
    """Right-continuous step distribution function.

    ``jump_points`` are strictly increasing, ``cum_probs`` increasing with
    final element exactly 1.  ``n`` is the sample size (or total weight)
    behind the function; it is carried along for rate calculations.
    """

    jump_points: np.ndarray
    cum_probs: np.ndarray
    n: float

    def __post_init__(self):
        jp = np.asarray(self.jump_points, dtype=float)
        cp = np.asarray(self.cum_probs, dtype=float)
        if jp.size == 0 or jp.shape != cp.shape:
            raise ValueError("jump_points and cum_probs must be nonempty and congruent")
        if jp.size > 1 and not np.all(np.diff(jp) > 0):
            raise ValueError("jump_points must be strictly increasing")
        if cp.size > 1 and np.any(np.diff(cp) <= 0):
            raise ValueError("cum_probs must be strictly increasing")
        if abs(cp[-1] - 1.0) > 1e-12:
            raise ValueError("cum_probs must end at 1 (within 1e-12)")
        cp = cp.copy()
        cp[-1] = 1.0
        object.__setattr__(self, "jump_points", jp)
        object.__setattr__(self, "cum_probs", cp)
        # leading zero so searchsorted indices map directly to probabilities
        object.__setattr__(self, "_cum0", np.concatenate(([0.0], cp)))

    def eval(self, x):
        """P(X <= x), right-continuous in x.  Accepts scalars or arrays."""
        idx = np.searchsorted(self.jump_points, x, side="right")
        out = self._cum0[idx]
        return float(out) if np.isscalar(x) else out

    __call__ = eval

    def left_limit(self, x):
        """P(X < x): the limit of ``eval`` from the left."""
        idx = np.searchsorted(self.jump_points, x, side="left")
        out = self._cum0[idx]
        return float(out) if np.isscalar(x) else out

    def quantile(self, tau):
        """Generalized inverse inf{x : F(x) >= tau} for tau in (0, 1]."""
        t = np.asarray(tau, dtype=float)
        if np.any(t <= 0.0) or np.any(t > 1.0):
            raise ValueError("quantile level must lie in (0, 1]")
        idx = np.searchsorted(self.cum_probs, t, side="left")
        out = self.jump_points[idx]
        return float(out) if np.isscalar(tau) else out


def ecdf_build(sample: Sample) -> StepCDF:
    """Empirical CDF with ties merged into a single jump of aggregate mass."""
    uniq, counts = np.unique(sample.values, return_counts=True)
    n = sample.values.size
    cum = np.cumsum(counts) / n
    cum[-1] = 1.0
    return StepCDF(jump_points=uniq, cum_probs=cum, n=float(n))


def weighted_ecdf(values: np.ndarray, weights: np.ndarray) -> StepCDF:
    """Step CDF putting mass w_i / sum(w) at each observation."""
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if values.shape != weights.shape:
        raise ValueError("weights length must match sample size")
    if np.any(weights < 0):
        raise ValueError("weights must be nonnegative")
    total = weights.sum()
    if total <= 0:
        raise ValueError("weights must have positive total mass")
    order = np.argsort(values, kind="stable")
    v, w = values[order], weights[order]
    # merge ties
    uniq, start = np.unique(v, return_index=True)
    mass = np.add.reduceat(w, start) / total
    keep = mass > 0
    cum = np.cumsum(mass[keep])
    cum[-1] = 1.0
    return StepCDF(jump_points=uniq[keep], cum_probs=cum, n=float(total))


def ecdf_eval(F: StepCDF, x):
    return F.eval(x)


def ecdf_left_limit(F: StepCDF, x):
    return F.left_limit(x)


def quantile(F: StepCDF, tau):
    return F.quantile(tau)


class CsvParseError(ValueError):
    """Malformed CSV input; message carries the offending line number."""


def load_sample_csv(path, column=None, label: str | None = None) -> Sample:
    """Read one numeric column from a CSV file into a Sample.

    ``column`` selects by header name or zero-based index; defaults to the
    first column.  A non-numeric first row is treated as a header.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [(i + 1, r) for i, r in enumerate(rows) if any(cell.strip() for cell in r)]
    if not rows:
        raise CsvParseError(f"{path}: no data rows")

    col_idx = 0
    header = None
    first_line, first = rows[0]
    if isinstance(column, str):
        header = [c.strip() for c in first]
        if column not in header:
            raise CsvParseError(f"{path}: column {column!r} not found in header")
        col_idx = header.index(column)
        rows = rows[1:]
    else:
        if column is not None:
            col_idx = int(column)
        try:
            float(first[col_idx])
        except (ValueError, IndexError):
            header = first
            rows = rows[1:]

    values = []
    for lineno, row in rows:
        if col_idx >= len(row):
            raise CsvParseError(f"{path}:{lineno}: missing column {col_idx}")
        cell = row[col_idx].strip()
        try:
            values.append(float(cell))
        except ValueError:
            raise CsvParseError(f"{path}:{lineno}: not a number: {cell!r}") from None
    if not values:
        raise CsvParseError(f"{path}: no numeric rows")
    return Sample(np.asarray(values), label=label or path.stem)
