"""Property suites runnable without pytest (``vlczf verify``).

Each check returns a :class:`CheckResult`; sizes are scaled down from the
full test-suite versions so the whole run takes a few seconds.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import geometry as geo
from .capacity import SnrRatio, capacity, epi_lower_bound, mc_mutual_information_stats
from .channel_model import LambertianParams, RoomLayout, build_channel
from .geometry import ChannelMatrix, canonicalize
from .rate_region import contains, solve_alpha, trace_boundary, RatePoint

XI_SWEEP = np.round(np.arange(1, 20) * 0.05, 2)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail} ({self.seconds:.2f}s)"


def random_canonical_channels(n: int, seed: int = 0, high: float = 5.0) -> list[ChannelMatrix]:
    """``n`` canonical channels with entries uniform in (0, high] and det < 0."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        m = high * (1.0 - rng.random((2, 2)))
        if m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0] < -1e-3:
            out.append(canonicalize(m))
    return out


def _timed(fn):
    def wrapper(*a, **kw):
        t0 = time.perf_counter()
        res = fn(*a, **kw)
        res.seconds = time.perf_counter() - t0
        return res
    wrapper.__name__ = fn.__name__
    return wrapper


@_timed
def check_oracle_equivalence(n_channels=50, grid_step=1e-7, tol=1e-5, seed=0):
    worst = 0.0
    for H in random_canonical_channels(n_channels, seed):
        for xi in XI_SWEEP:
            lmax = geo.l1_max(H, xi)
            worst = max(worst, abs(lmax - geo.oracle_l1_max(H, xi, grid_step)))
            for f in (0.0, 0.25, 0.5, 0.75, 1.0):
                x = f * lmax
                worst = max(worst, abs(geo.l2_xi(H, xi, x) - geo.oracle_l2_xi(H, xi, x, grid_step)))
    return CheckResult("geometry-oracle equivalence", worst <= tol, f"max |closed - oracle| = {worst:.2e}")


@_timed
def check_symmetry_monotonicity(n_channels=50, seed=1):
    l1_asym = increases = dominance = 0
    l2_asym = 0.0
    for H in random_canonical_channels(n_channels, seed):
        for xi in XI_SWEEP:
            if geo.l1_max(H, xi) != geo.l1_max(H, 1.0 - xi):
                l1_asym += 1
            lmax = geo.l1_max(H, xi)
            xs = np.linspace(0.0, lmax, 41)
            vals = [geo.l2_xi(H, xi, x) for x in xs]
            increases += int(np.sum(np.diff(vals) > 1e-12 * H.scale))
            l2_asym = max(l2_asym, max(abs(v - geo.l2_xi(H, 1.0 - xi, x)) for v, x in zip(vals, xs)))
            dominance += sum(v > geo.l2_xi(H, 0.5, x) + 1e-12 * H.scale for v, x in zip(vals, xs))
    ok = l1_asym == 0 and increases == 0 and l2_asym <= 1e-12 and dominance == 0
    return CheckResult("symmetry and monotonicity", ok,
                       f"L1 asym={l1_asym}, L2 increases={increases}, "
                       f"max L2 asym={l2_asym:.1e}, dominance violations={dominance}")


@_timed
def check_capacity(num_samples=10**6, seed=0):
    snr = 1.0
    worst_mc, worst_epi, worst_scale = 0.0, 0.0, 0.0
    for a in np.logspace(-1, 4, 6):
        est, se = mc_mutual_information_stats(a, snr, num_samples, seed)
        worst_mc = max(worst_mc, abs(est - capacity(a, snr)))
        worst_epi = max(worst_epi, epi_lower_bound(a, snr) - capacity(a, snr))
        worst_scale = max(worst_scale, abs(capacity(a, snr) - capacity(3.7 * a, snr / 3.7)))
    ok = worst_mc <= 0.01 and worst_epi <= 1e-6 and worst_scale <= 1e-9
    return CheckResult("capacity quadrature", ok,
                       f"|quad - MC| <= {worst_mc:.1e}, EPI excess {worst_epi:.1e}, "
                       f"scale err {worst_scale:.1e}")


@_timed
def check_fig4_nesting(num_samples=128):
    snr = SnrRatio.from_db(70)
    H = build_channel(RoomLayout.linear(-2.0, 2.0), LambertianParams())
    xis = [0.1, 0.2, 0.3, 0.4, 0.5]
    bad = 0
    for a, b in zip(xis, xis[1:]):
        for p in trace_boundary(H, snr, a, num_samples).points:
            if not contains(H, snr, b, p):
                bad += 1
    b3 = trace_boundary(H, snr, 0.3, num_samples)
    b7 = trace_boundary(H, snr, 0.7, num_samples)
    sym = max(np.max(np.abs(b3.r1 - b7.r1)), np.max(np.abs(b3.r2 - b7.r2)))
    return CheckResult("boundary nesting and xi symmetry", bad == 0 and sym <= 1e-9,
                       f"uncontained points={bad}, |B(0.3) - B(0.7)| = {sym:.1e}")


@_timed
def check_r_alpha(n_channels=10, seed=2):
    snr = SnrRatio(30.0)
    worst = 0.0
    square = 0.0
    for H in random_canonical_channels(n_channels, seed, high=1.0):
        for alpha in (0.5, 1.0, 2.0):
            x, p = solve_alpha(H, snr, 0.3, alpha)
            l2 = geo.l2_xi(H, 0.3, x)
            worst = max(worst, abs(p.r2 - capacity(l2, snr)))
            if alpha == 1.0:
                square = max(square, abs(x - l2))
    ok = worst <= 1e-6 and square <= 1e-8
    return CheckResult("R_alpha_max on boundary", ok,
                       f"|r2 - C(L2(x*))| <= {worst:.1e}, |x* - L2(x*)| <= {square:.1e}")


@_timed
def check_transceiver(num_symbols=10**5):
    from .transceiver import TxConfig, run_sim
    from .capacity import CapacityFn

    snr = SnrRatio.from_db(70)
    H = build_channel(RoomLayout.linear(-2.0, 2.0), LambertianParams())
    x = 0.4 * geo.l1_max(H, 0.3)
    C = CapacityFn(snr)
    tgt = RatePoint(C(0.95 * x), C(0.95 * geo.l2_xi(H, 0.3, x)))
    rep = run_sim(TxConfig(H, snr, 0.3, tgt, num_symbols, seed=0))
    mean_ok = all(abs(m - 0.3) <= 4 * se for m, se in zip(rep.led_mean, rep.led_mean_stderr))
    mi_err = max(abs(a - b) for a, b in zip(rep.mi_estimate, rep.capacity))
    ok = rep.feasible and mean_ok and rep.mui_residual <= 1e-10 and mi_err <= 0.02
    return CheckResult("transceiver simulation", ok,
                       f"LED means {np.round(rep.led_mean, 4).tolist()}, MUI {rep.mui_residual:.1e}, "
                       f"|MI - C| <= {mi_err:.3f}")


CHECKS = [
    check_oracle_equivalence,
    check_symmetry_monotonicity,
    check_capacity,
    check_fig4_nesting,
    check_r_alpha,
    check_transceiver,
]


def run_all() -> list[CheckResult]:
    return [c() for c in CHECKS]
