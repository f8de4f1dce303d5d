import numpy as np
import pytest
from hypothesis import given, strategies as st

from vlczf import geometry as geo
from vlczf.capacity import CapacityFn, SnrRatio
from vlczf.errors import InvalidAlpha
from vlczf.geometry import ChannelMatrix
from vlczf.rate_region import (RatePoint, boundary_grid, check_membership, contains, r_alpha_max,
                               solve_alpha, sym_rate, trace_boundary, verify_containment)

from conftest import canonical_channels, fractions

SNR = SnrRatio(20.0)
H_EXAMPLE = ChannelMatrix(1.0, 2.0, 2.0, 1.0)
interior_xis = st.floats(0.02, 0.98)


class TestRatePoint:
    @pytest.mark.parametrize("r1,r2", [(-0.1, 0.0), (0.0, np.inf), (np.nan, 1.0)])
    def test_invalid(self, r1, r2):
        with pytest.raises(ValueError):
            RatePoint(r1, r2)


class TestBoundary:
    def test_grid_contains_kinks(self):
        H = ChannelMatrix(0.2, 1.0, 1.5, 0.9)
        xi = 0.3
        eta3, eta4 = geo.case_breakpoints(H, xi)
        grid = boundary_grid(H, xi, 16)
        for e in (eta3, eta4):
            if 0 < e < geo.l1_max(H, xi):
                assert np.min(np.abs(grid - e)) == 0.0
        assert np.all(np.diff(grid) > 0)

    def test_coincident_kinks_once(self):
        assert geo.case_breakpoints(H_EXAMPLE, 0.5) == (1.0, 1.0)
        np.testing.assert_array_equal(boundary_grid(H_EXAMPLE, 0.5, 3), [0.0, 0.75, 1.0, 1.5])

    def test_zero_dimming_single_point(self):
        b = trace_boundary(H_EXAMPLE, SNR, 0.0)
        assert len(b) == 1
        assert b.points == [RatePoint(0.0, 0.0)]

    def test_samples_consistent(self):
        b = trace_boundary(H_EXAMPLE, SNR, 0.4, 32)
        C = CapacityFn(SNR)
        for x, l2, p in b.samples:
            assert p.r1 == C(x) and p.r2 == C(l2)

    @given(canonical_channels(), interior_xis)
    def test_pareto_ordering(self, H, xi):
        b = trace_boundary(H, SNR, xi, 64)
        assert np.all(np.diff(b.r1) >= 0)
        assert np.all(np.diff(b.r2) <= 1e-14)

    def test_bad_sample_count(self):
        with pytest.raises(ValueError):
            boundary_grid(H_EXAMPLE, 0.5, 1)


class TestMembership:
    @given(canonical_channels(), interior_xis, fractions, st.floats(0.0, 0.999))
    def test_below_boundary_inside(self, H, xi, f, shrink):
        C = CapacityFn(SNR)
        x = f * geo.l1_max(H, xi)
        p = RatePoint(shrink * C(x), shrink * C(geo.l2_xi(H, xi, x)))
        assert contains(H, SNR, xi, p)

    @given(canonical_channels(), interior_xis, fractions)
    def test_above_boundary_outside(self, H, xi, f):
        C = CapacityFn(SNR)
        x = f * geo.l1_max(H, xi)
        p = RatePoint(C(x), C(geo.l2_xi(H, xi, x)) * 1.01 + 1e-3)
        assert not contains(H, SNR, xi, p)

    def test_boundary_points_inside(self):
        for p in trace_boundary(H_EXAMPLE, SNR, 0.3, 64).points:
            assert contains(H_EXAMPLE, SNR, 0.3, p)

    def test_margin_and_reason(self):
        C = CapacityFn(SNR)
        lmax = geo.l1_max(H_EXAMPLE, 0.5)
        m = check_membership(H_EXAMPLE, SNR, 0.5, RatePoint(C(2 * lmax), 0.0))
        assert not m.inside and m.reason == "L1 exceeds L1_max"
        assert m.margin == pytest.approx(-1.0, rel=1e-9)
        m = check_membership(H_EXAMPLE, SNR, 0.5, RatePoint(C(0.5 * lmax), 0.0))
        assert m.inside and m.margin == pytest.approx(0.5, rel=1e-9)

    def test_unreachable_rate_is_outside(self):
        m = check_membership(H_EXAMPLE, SNR, 0.5, RatePoint(1e3, 0.0))
        assert not m.inside and "exceeds" in m.reason


class TestAlpha:
    def test_hand_square(self):
        # L2(x) = min(1.5 - x/2, 3 - 2x) at xi = 1/2 (see test_geometry): square side 1.
        x, p = solve_alpha(H_EXAMPLE, SNR, 0.5, 1.0)
        assert x == pytest.approx(1.0, abs=1e-12)
        assert p.r1 == p.r2 == pytest.approx(CapacityFn(SNR)(1.0), abs=1e-12)

    @given(canonical_channels(), interior_xis, st.floats(0.1, 10.0))
    def test_on_boundary(self, H, xi, alpha):
        x, p = solve_alpha(H, SNR, xi, alpha)
        C = CapacityFn(SNR)
        assert p.r2 == alpha * p.r1
        assert abs(p.r2 - C(geo.l2_xi(H, xi, x))) <= 1e-8

    @given(canonical_channels(), interior_xis, st.floats(0.1, 10.0), st.floats(1.001, 1.1))
    def test_maximal(self, H, xi, alpha, grow):
        p = r_alpha_max(H, SNR, xi, alpha)
        assert contains(H, SNR, xi, p)
        assert not contains(H, SNR, xi, RatePoint(grow * p.r1 + 1e-6, grow * p.r2 + 1e-6))

    @given(canonical_channels(), interior_xis)
    def test_sym_rate_symmetric_in_xi(self, H, xi):
        assert abs(sym_rate(H, SNR, xi) - sym_rate(H, SNR, 1.0 - xi)) <= 1e-9

    @pytest.mark.parametrize("alpha", [0.0, -1.0, np.nan])
    def test_invalid_alpha(self, alpha):
        with pytest.raises(InvalidAlpha):
            solve_alpha(H_EXAMPLE, SNR, 0.5, alpha)

    @pytest.mark.parametrize("xi", [0.0, 1.0])
    def test_degenerate_region(self, xi):
        assert sym_rate(H_EXAMPLE, SNR, xi) == 0.0


class TestContainment:
    @given(canonical_channels(), st.floats(0.0, 1.0))
    def test_half_contains_all(self, H, xi):
        rep = verify_containment(H, SNR, xi, 64)
        assert rep.ok, rep
