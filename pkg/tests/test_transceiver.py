import json

import numpy as np
import pytest

from vlczf import geometry as geo
from vlczf.capacity import CapacityFn, SnrRatio
from vlczf.errors import ConstraintViolation
from vlczf.geometry import ChannelMatrix, canonicalize
from vlczf.rate_region import RatePoint
from vlczf import transceiver as tx
from vlczf.transceiver import TxConfig, dimming_invariance_check, run_sim, tx_controller

SNR = SnrRatio(50.0)
H = ChannelMatrix(1.0, 2.0, 2.0, 1.0)
H_SWAPPED = canonicalize([[2.0, 0.5], [1.0, 1.5]])


def interior_targets(H, xi, frac=0.5, shrink=0.9):
    C = CapacityFn(SNR)
    x = frac * geo.l1_max(H, xi)
    return RatePoint(shrink * C(x), shrink * C(geo.l2_xi(H, xi, x)))


class TestController:
    def test_feasible(self):
        d = tx_controller(H, SNR, 0.3, interior_targets(H, 0.3))
        assert d.status == 1
        assert d.mean == pytest.approx((0.9, 0.9))
        C = CapacityFn(SNR)
        t = interior_targets(H, 0.3)
        assert C(d.l1) == pytest.approx(t.r1, abs=1e-10)
        assert C(d.l2) == pytest.approx(t.r2, abs=1e-10)

    def test_infeasible(self):
        d = tx_controller(H, SNR, 0.3, RatePoint(10.0, 10.0))
        assert d.status == 0 and np.isnan(d.l1)


class TestSimulation:
    @pytest.mark.parametrize("Hc", [H, H_SWAPPED])
    def test_constraints_and_means(self, Hc):
        rep = run_sim(TxConfig(Hc, SNR, 0.3, interior_targets(Hc, 0.3), 200_000, seed=4))
        assert rep.feasible
        assert min(rep.led_min) >= 0.0 and max(rep.led_max) <= 1.0
        for m, se in zip(rep.led_mean, rep.led_mean_stderr):
            assert abs(m - 0.3) <= 4 * se
        assert rep.mui_residual <= 1e-10
        for est, c in zip(rep.mi_estimate, rep.capacity):
            assert abs(est - c) <= 0.02

    def test_physical_order_when_swapped(self):
        # Asymmetric target so the two LEDs have visibly different ranges.
        t = interior_targets(H_SWAPPED, 0.4, frac=0.9)
        rep = run_sim(TxConfig(H_SWAPPED, SNR, 0.4, t, 20_000, seed=1))
        lengths = np.array(rep.interval_lengths)
        codeword_span = np.abs(np.linalg.inv(H_SWAPPED.matrix)) @ lengths  # per canonical LED
        physical_span = np.array(rep.led_max) - np.array(rep.led_min)
        np.testing.assert_allclose(physical_span, codeword_span[::-1], rtol=0.02)

    def test_thread_count_irrelevant(self):
        cfg = TxConfig(H, SNR, 0.3, interior_targets(H, 0.3), 100_000, seed=9, batch_size=8192)
        a = run_sim(cfg, threads=1).to_json()
        b = run_sim(cfg, threads=4).to_json()
        assert a == b

    def test_seed_changes_output(self):
        t = interior_targets(H, 0.3)
        a = run_sim(TxConfig(H, SNR, 0.3, t, 5000, seed=1))
        b = run_sim(TxConfig(H, SNR, 0.3, t, 5000, seed=2))
        assert a.led_mean != b.led_mean

    def test_infeasible_report(self):
        rep = run_sim(TxConfig(H, SNR, 0.3, RatePoint(0.1, 10.0), 1000))
        assert not rep.feasible
        assert rep.infeasible_reason
        assert rep.margin is not None and rep.margin < 0
        json.loads(rep.to_json())

    def test_violation_detected(self, monkeypatch):
        # Force lengths past the feasible set to confirm the power check fires.
        real = tx.tx_controller

        def inflated(*a):
            d = real(*a)
            return tx.TxDecision(d.status, 3 * d.l1, 3 * d.l2, d.mean, d.membership)

        monkeypatch.setattr(tx, "tx_controller", inflated)
        with pytest.raises(ConstraintViolation):
            run_sim(TxConfig(H, SNR, 0.3, interior_targets(H, 0.3, shrink=0.99), 20_000))

    @pytest.mark.parametrize("kw", [dict(num_symbols=0), dict(batch_size=0)])
    def test_config_validation(self, kw):
        with pytest.raises(ValueError):
            TxConfig(H, SNR, 0.3, RatePoint(0, 0), **kw)


class TestDimmingSeparation:
    def test_codewords_shared(self):
        res = dimming_invariance_check(H, SNR, 0.3, 0.45, interior_targets(H, 0.3), 20_000, seed=3)
        assert res.ok and res.codeword_identical
        assert res.expected_shift == pytest.approx([-0.45, -0.45])
        assert res.status_a == res.status_b == 1
