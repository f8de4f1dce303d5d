"""Monte-Carlo model of the dimming-separated ZF transceiver.

Transmit chain per symbol: codeword symbols ``u'_i ~ Unif[-1/2, 1/2]`` from a
dimming-agnostic encoder, the mean shift ``u_i = L_i u'_i + xi (h_i1 + h_i2)``,
ZF precoding ``x' = H^-1 u`` and the AWGN channel ``y = H x' + n``.  P0 is
normalized to 1, so transmit powers are reported as fractions of P0 and rates
in bits per channel use.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import geometry as geo
from .capacity import CapacityFn, SnrRatio, _as_snr, information_density_bits
from .errors import ConstraintViolation
from .geometry import ChannelMatrix
from .rate_region import Membership, RatePoint, check_membership

#: Slack on per-sample normalized LED power.
POWER_SLACK = 1e-12
DEFAULT_BATCH = 1 << 16


@dataclass(frozen=True)
class TxDecision:
    status: int
    l1: float
    l2: float
    mean: tuple[float, float]
    membership: Membership


def tx_controller(H: ChannelMatrix, snr, xi: float, targets: RatePoint) -> TxDecision:
    """Flag 1 with interval lengths and the mean vector if the targets are
    achievable; flag 0 otherwise."""
    m = check_membership(H, snr, xi, targets)
    D = geo.dimming_point(H, xi)
    if not m.inside:
        return TxDecision(0, float("nan"), float("nan"), (D.u1, D.u2), m)
    return TxDecision(1, m.l1, m.l2, (D.u1, D.u2), m)


@dataclass(frozen=True)
class TxConfig:
    H: ChannelMatrix
    snr: SnrRatio
    xi: float
    targets: RatePoint
    num_symbols: int = 10**6
    seed: int = 0
    batch_size: int = DEFAULT_BATCH

    def __post_init__(self):
        if self.num_symbols < 1:
            raise ValueError("num_symbols must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass
class SimReport:
    """Statistics of one simulation run.

    Units: LED powers are normalized to P0 (0 = off, 1 = peak); rates and MI
    estimates are bits per channel use; ``mui_residual`` is in the normalized
    received-signal units of ``y``.  LED statistics are in physical LED order.
    """

    feasible: bool
    num_symbols: int
    seed: int
    xi: float
    targets: list
    interval_lengths: list = field(default_factory=list)
    mean_vector: list = field(default_factory=list)
    led_min: list = field(default_factory=list)
    led_max: list = field(default_factory=list)
    led_mean: list = field(default_factory=list)
    led_mean_stderr: list = field(default_factory=list)
    mui_residual: float | None = None
    mi_estimate: list = field(default_factory=list)
    mi_stderr: list = field(default_factory=list)
    capacity: list = field(default_factory=list)
    infeasible_reason: str = ""
    margin: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kw)


def _batch_sizes(n, batch):
    full, rest = divmod(n, batch)
    return [batch] * full + ([rest] if rest else [])


def codeword_batches(seed: int, num_symbols: int, batch_size: int = DEFAULT_BATCH):
    """Per-batch generators split deterministically from ``seed``."""
    sizes = _batch_sizes(num_symbols, batch_size)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    return list(zip(sizes, children))


def _draw(size, child):
    rng = np.random.default_rng(child)
    codeword = rng.uniform(-0.5, 0.5, (size, 2))
    noise = rng.standard_normal((size, 2))
    return codeword, noise


def _simulate_batch(args):
    size, child, H, Hinv, lengths, mean, s, snr = args
    codeword, noise = _draw(size, child)
    n = noise * s
    u = codeword * lengths + mean
    x = u @ Hinv.T
    y = x @ H.T + n
    mui = float(np.max(np.abs(y - u - n)))
    left = mean - 0.5 * lengths
    mi_sum = np.zeros(2)
    mi_sq = np.zeros(2)
    for i in range(2):
        if lengths[i] > 0:
            dens = information_density_bits(u[:, i] - left[i], y[:, i] - left[i], lengths[i], snr)
            mi_sum[i] = dens.sum()
            mi_sq[i] = np.dot(dens, dens)
    return dict(
        n=size, xmin=x.min(axis=0), xmax=x.max(axis=0), xsum=x.sum(axis=0),
        xsq=(x * x).sum(axis=0), mui=mui, mi_sum=mi_sum, mi_sq=mi_sq,
    )


def run_sim(config: TxConfig, threads: int = 1) -> SimReport:
    """Simulate ``num_symbols`` channel uses; infeasible targets give a report
    with ``feasible=False`` and no statistics.

    Raises:
        ConstraintViolation: a transmitted power left [0, 1] beyond slack.
    """
    H, snr, xi = config.H, _as_snr(config.snr), config.xi
    tgt = [config.targets.r1, config.targets.r2]
    dec = tx_controller(H, snr, xi, config.targets)
    if dec.status != 1:
        return SimReport(False, config.num_symbols, config.seed, xi, tgt,
                         mean_vector=list(dec.mean),
                         infeasible_reason=dec.membership.reason,
                         margin=_finite(dec.membership.margin))
    lengths = np.array([dec.l1, dec.l2])
    mean = np.array(dec.mean)
    Hm, Hinv = H.matrix, H.inverse
    jobs = [(size, child, Hm, Hinv, lengths, mean, snr.noise_std, snr)
            for size, child in codeword_batches(config.seed, config.num_symbols, config.batch_size)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_simulate_batch, jobs))
    else:
        parts = [_simulate_batch(j) for j in jobs]

    N = sum(p["n"] for p in parts)
    xmin = np.min([p["xmin"] for p in parts], axis=0)
    xmax = np.max([p["xmax"] for p in parts], axis=0)
    if np.any(xmin < -POWER_SLACK) or np.any(xmax > 1.0 + POWER_SLACK):
        raise ConstraintViolation(f"LED power range [{xmin}, {xmax}] leaves [0, 1]")
    xsum = np.sum([p["xsum"] for p in parts], axis=0)
    xsq = np.sum([p["xsq"] for p in parts], axis=0)
    xmean = xsum / N
    xvar = np.maximum(xsq / N - xmean ** 2, 0.0)
    mi_sum = np.sum([p["mi_sum"] for p in parts], axis=0)
    mi_sq = np.sum([p["mi_sq"] for p in parts], axis=0)
    mi = mi_sum / N
    mi_var = np.maximum(mi_sq / N - mi ** 2, 0.0)

    order = [1, 0] if H.swapped else [0, 1]
    C = CapacityFn(snr)
    return SimReport(
        feasible=True, num_symbols=N, seed=config.seed, xi=xi, targets=tgt,
        interval_lengths=lengths.tolist(), mean_vector=mean.tolist(),
        led_min=xmin[order].tolist(), led_max=xmax[order].tolist(),
        led_mean=xmean[order].tolist(), led_mean_stderr=np.sqrt(xvar / N)[order].tolist(),
        mui_residual=max(p["mui"] for p in parts),
        mi_estimate=mi.tolist(), mi_stderr=np.sqrt(mi_var / N).tolist(),
        capacity=[C(dec.l1), C(dec.l2)],
        margin=_finite(dec.membership.margin),
    )


def _finite(v):
    return float(v) if v is not None and math.isfinite(v) else None


@dataclass
class DimmingInvariance:
    ok: bool
    codeword_identical: bool
    max_shift_error: float
    expected_shift: list
    status_a: int
    status_b: int


def dimming_invariance_check(H: ChannelMatrix, snr, xi_a: float, xi_b: float,
                             targets: RatePoint, num_symbols: int = 10**4,
                             seed: int = 0, batch_size: int = DEFAULT_BATCH) -> DimmingInvariance:
    """Same encoder, two dimming targets: codewords must be identical and the
    information symbols must differ only by the constant mean shift.

    Interval lengths come from the targets and are shared by both runs, so
    feasibility may differ between the two targets; that is reported in the
    status fields and is not a failure.
    """
    snr = _as_snr(snr)
    C = CapacityFn(snr)
    lengths = np.array([C.inverse(targets.r1), C.inverse(targets.r2)])
    status_a = tx_controller(H, snr, xi_a, targets).status
    status_b = tx_controller(H, snr, xi_b, targets).status
    Da, Db = geo.dimming_point(H, xi_a), geo.dimming_point(H, xi_b)
    mean_a, mean_b = np.array([Da.u1, Da.u2]), np.array([Db.u1, Db.u2])
    expected = (xi_a - xi_b) * np.array([H.h11 + H.h12, H.h21 + H.h22])
    identical = True
    err = 0.0
    for size, child in codeword_batches(seed, num_symbols, batch_size):
        cw_a, _ = _draw(size, child)
        cw_b, _ = _draw(size, child)
        identical &= bool(np.array_equal(cw_a, cw_b))
        ua = cw_a * lengths + mean_a
        ub = cw_b * lengths + mean_b
        err = max(err, float(np.max(np.abs((ua - ub) - expected))))
    scale = max(float(np.max(np.abs(mean_a))), float(np.max(np.abs(mean_b))), 1e-300)
    ok = identical and err <= 1e-15 * max(scale, 1.0)
    return DimmingInvariance(ok, identical, err, expected.tolist(), status_a, status_b)
