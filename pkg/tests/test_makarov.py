import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from vfi.empirical import Sample, ecdf_build
from vfi.makarov import (
    MakarovStructure,
    bounds_from_csv,
    bounds_to_csv,
    compute_bounds,
    default_grid,
    lower_bound,
    makarov_objective,
    quantile_bounds,
    support_bounds,
    upper_bound,
)
from vfi.valuemap import Grid, psi


def brute_lower(F1, X0, x):
    """Independent enumeration on the shifted control sample: both
    one-sided limits at every event of F1 and of ecdf(X0 + x)."""
    G = ecdf_build(Sample(X0.values + x))
    best = 0.0
    for u in np.concatenate((F1.jump_points, G.jump_points)):
        best = max(best, F1(u) - G(u), F1.left_limit(u) - G.left_limit(u))
    return min(best, 1.0)


def brute_upper(F1, X0, x):
    G = ecdf_build(Sample(X0.values + x))
    worst = 0.0
    for u in np.concatenate((F1.jump_points, G.jump_points)):
        worst = min(worst, F1(u) - G(u), F1.left_limit(u) - G.left_limit(u))
    return max(1.0 + worst, 0.0)


def random_pair(rng, nmax=15):
    X1 = Sample(rng.normal(0, 1, rng.integers(2, nmax)))
    X0 = Sample(rng.normal(0.3, 1.2, rng.integers(2, nmax)))
    return X1, X0


class TestBoundsOracle:
    def test_matches_brute_force(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            X1, X0 = random_pair(rng)
            F1, F0 = ecdf_build(X1), ecdf_build(X0)
            grid = default_grid(support_bounds(X1, X0), 0.21)
            L = lower_bound(F1, F0, grid).values
            U = upper_bound(F1, F0, grid).values
            for k, x in enumerate(grid.points):
                assert L[k] == pytest.approx(brute_lower(F1, X0, x), abs=1e-12)
                assert U[k] == pytest.approx(brute_upper(F1, X0, x), abs=1e-12)

    def test_hand_case(self):
        X1 = Sample(np.array([1.0, 2.0]))
        X0 = Sample(np.array([0.0, 1.0]))
        F1, F0 = ecdf_build(X1), ecdf_build(X0)
        g = Grid(points=np.array([1.0, 1.5, 2.5]), step=0.5)
        assert_array_equal(lower_bound(F1, F0, g).values, [0.0, 0.5, 1.0])

    def test_bounds_are_cdf_like(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            X1, X0 = random_pair(rng)
            pair = compute_bounds(X1, X0, step=0.17)
            L, U = pair.lower.values, pair.upper.values
            assert np.all(L <= U + 1e-15)
            assert np.all(np.diff(L) >= -1e-15) and np.all(np.diff(U) >= -1e-15)
            assert np.all((0 <= L) & (U <= 1))
            # padded grid reaches both tails
            assert L[0] == 0.0 and U[-1] == 1.0

    def test_degenerate_control_identity(self):
        # constant control: bounds collapse to one-sided limits of F1
        X1 = Sample(np.array([1.0, 3.0]))
        X0 = Sample(np.array([0.0, 0.0]))
        F1, F0 = ecdf_build(X1), ecdf_build(X0)
        g = Grid(points=np.array([0.5, 1.0, 2.0, 3.0, 3.5]), step=0.5)
        assert_array_equal(lower_bound(F1, F0, g).values, F1.left_limit(g.points))
        assert_array_equal(upper_bound(F1, F0, g).values, F1(g.points))


class TestStructure:
    def test_psi_of_structure_equals_direct_bounds(self):
        rng = np.random.default_rng(9)
        for _ in range(40):
            X1, X0 = random_pair(rng)
            F1, F0 = ecdf_build(X1), ecdf_build(X0)
            grid = default_grid(support_bounds(X1, X0), 0.19)
            s = MakarovStructure(F1, F0, grid)
            Lv = np.clip(psi(s.objective("lower")).values, 0.0, 1.0)
            Uv = np.clip(1.0 - np.maximum(psi(s.objective("upper")).values, 0.0), 0.0, 1.0)
            assert_array_equal(Lv, lower_bound(F1, F0, grid).values)
            # the direct path arranges the arithmetic differently; agreement
            # is up to one rounding step
            assert_allclose(Uv, upper_bound(F1, F0, grid).values, atol=1e-15, rtol=0)

    def test_base_weights_reproduce_plugin(self):
        rng = np.random.default_rng(10)
        X1, X0 = random_pair(rng)
        F1, F0 = ecdf_build(X1), ecdf_build(X0)
        grid = default_grid(support_bounds(X1, X0), 0.3)
        s = MakarovStructure(F1, F0, grid)
        assert_array_equal(s.evaluate(s.c1, s.c0), s.base_values())

    def test_objective_rejects_unknown_orientation(self):
        X1, X0 = random_pair(np.random.default_rng(11))
        F1, F0 = ecdf_build(X1), ecdf_build(X0)
        grid = default_grid(support_bounds(X1, X0), 0.5)
        with pytest.raises(ValueError, match="orientation"):
            makarov_objective(F1, F0, grid, orientation="sideways")


class TestSupport:
    def test_formulas(self):
        rng = np.random.default_rng(12)
        for _ in range(50):
            X1, X0 = random_pair(rng, nmax=9)
            info = support_bounds(X1, X0)
            assert info.global_range == (X1.min - X0.max, X1.max - X0.min)
            n1, n0 = len(X1), len(X0)
            F1, F0 = ecdf_build(X1), ecdf_build(X0)
            levels = np.unique(np.r_[np.arange(1, n1 + 1) / n1, np.arange(1, n0 + 1) / n0])
            diffs = np.array([F1.quantile(t) - F0.quantile(t) for t in levels])
            assert info.lower_support == (diffs.min(), X1.max - X0.min)
            assert info.upper_support == (X1.min - X0.max, diffs.max())

    def test_hand_case(self):
        info = support_bounds(Sample(np.array([1.0, 2.0])), Sample(np.array([0.0, 1.0])))
        assert info.lower_support == (1.0, 2.0)
        assert info.upper_support == (0.0, 1.0)


class TestDefaultGrid:
    def test_pads_one_step(self):
        from vfi.makarov import SupportInfo

        info = SupportInfo((0.0, 1.0), (0.0, 1.0), (0.0, 1.0))
        g = default_grid(info, 0.5)
        assert_allclose(g.points, [-0.5, 0.0, 0.5, 1.0, 1.5])

    def test_degenerate_range(self):
        from vfi.makarov import SupportInfo

        info = SupportInfo((2.0, 2.0), (2.0, 2.0), (2.0, 2.0))
        g = default_grid(info)
        assert len(g) == 3 and g.points[1] == 2.0

    def test_covers_range(self):
        from vfi.makarov import SupportInfo

        rng = np.random.default_rng(13)
        for _ in range(30):
            lo = rng.normal()
            hi = lo + rng.uniform(0.1, 5)
            step = rng.uniform(0.01, 1)
            g = default_grid(SupportInfo((lo, hi), (lo, hi), (lo, hi)), step)
            assert g.points[0] <= lo and g.points[-1] >= hi


class TestQuantileBounds:
    def test_against_dense_scan(self):
        rng = np.random.default_rng(14)
        u_dense = np.linspace(1e-9, 1 - 1e-9, 200_001)
        for _ in range(15):
            X1, X0 = random_pair(rng, nmax=9)
            F1, F0 = ecdf_build(X1), ecdf_build(X0)
            for tau in (0.2, 0.5, 0.8):
                lo, hi = quantile_bounds(F1, F0, tau)
                us = u_dense[(u_dense > 0) & (u_dense < tau)]
                expect_lo = np.max(F1.quantile(us) - F0.quantile(us + 1 - tau))
                us = u_dense[(u_dense > tau) & (u_dense < 1)]
                expect_hi = np.min(F1.quantile(us) - F0.quantile(us - tau))
                assert lo[0] == expect_lo
                assert hi[0] == expect_hi

    def test_degenerate_control(self):
        # constant control: bounds are the one-sided quantiles of X1
        F1 = ecdf_build(Sample(np.array([1.0, 2.0, 3.0, 4.0])))
        F0 = ecdf_build(Sample(np.array([0.0, 0.0])))
        lo, hi = quantile_bounds(F1, F0, 0.5)
        assert lo[0] == 2.0  # Q1 just below 0.5
        assert hi[0] == 3.0  # Q1 just above 0.5

    def test_ordering_and_validation(self):
        rng = np.random.default_rng(15)
        X1, X0 = random_pair(rng)
        F1, F0 = ecdf_build(X1), ecdf_build(X0)
        lo, hi = quantile_bounds(F1, F0, [0.25, 0.5, 0.75])
        assert np.all(lo <= hi)
        with pytest.raises(ValueError):
            quantile_bounds(F1, F0, 0.0)
        with pytest.raises(ValueError):
            quantile_bounds(F1, F0, 1.0)


class TestSerialization:
    def test_csv_roundtrip_exact(self):
        rng = np.random.default_rng(16)
        X1, X0 = random_pair(rng)
        pair = compute_bounds(X1, X0, step=0.23)
        x, lo, hi = bounds_from_csv(bounds_to_csv(pair))
        assert_array_equal(x, pair.grid.points)
        assert_array_equal(lo, pair.lower.values)
        assert_array_equal(hi, pair.upper.values)
