"""The ZF rate region: boundary tracing, membership, and R_max^alpha.

A rate pair is achievable when ``(C(L1), C(L2))`` comes from a rectangle
``Rect(L1, L2, D)`` inside the parallelogram.  Since ``C`` is increasing in
``L``, the boundary is swept by ``x -> (C(x), C(L2(x)))`` for
``x in [0, L1_max]``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from .capacity import CapacityFn, SnrRatio, _as_snr
from .errors import InvalidAlpha, RateUnreachable
from .geometry import ChannelMatrix

log = logging.getLogger(__name__)

#: Relative slack on interval lengths in membership tests.
LENGTH_RTOL = 1e-9
DEFAULT_SAMPLES = 512


@dataclass(frozen=True)
class RatePoint:
    r1: float
    r2: float

    def __post_init__(self):
        if not (np.isfinite(self.r1) and np.isfinite(self.r2)):
            raise ValueError("rates must be finite")
        if self.r1 < 0 or self.r2 < 0:
            raise ValueError(f"rates must be >= 0, got ({self.r1}, {self.r2})")


@dataclass
class RegionBoundary:
    """Sampled Pareto boundary; ``x`` ascends from 0 to L1_max."""

    H: ChannelMatrix
    snr: SnrRatio
    xi: float
    x: np.ndarray
    l2: np.ndarray
    r1: np.ndarray
    r2: np.ndarray

    def __len__(self):
        return len(self.x)

    @property
    def samples(self):
        return [(float(a), float(b), RatePoint(float(c), float(d)))
                for a, b, c, d in zip(self.x, self.l2, self.r1, self.r2)]

    @property
    def points(self):
        return [RatePoint(float(c), float(d)) for c, d in zip(self.r1, self.r2)]


def boundary_grid(H: ChannelMatrix, xi: float, num_samples: int = DEFAULT_SAMPLES) -> np.ndarray:
    """Uniform grid on [0, L1_max] plus the in-range kinks of L2."""
    if num_samples < 2:
        raise ValueError("num_samples must be >= 2")
    lmax = geo.l1_max(H, xi)
    if lmax == 0.0:
        return np.zeros(1)
    grid = np.linspace(0.0, lmax, num_samples)
    extra = [e for e in geo.case_breakpoints(H, xi) if 0.0 < e < lmax]
    if extra:
        gap = 1e-9 * lmax
        for e in sorted(extra):
            if np.min(np.abs(grid - e)) > gap:
                grid = np.sort(np.append(grid, e))
    return grid


def trace_boundary(H: ChannelMatrix, snr, xi: float,
                   num_samples: int = DEFAULT_SAMPLES) -> RegionBoundary:
    snr = _as_snr(snr)
    C = CapacityFn(snr)
    xs = boundary_grid(H, xi, num_samples)
    l2 = np.array([geo.l2_xi(H, xi, x) for x in xs])
    r1 = np.array([C(x) for x in xs])
    r2 = np.array([C(v) for v in l2])
    return RegionBoundary(H, snr, xi, xs, l2, r1, r2)


@dataclass(frozen=True)
class Membership:
    """Outcome of a membership test in the length domain."""

    inside: bool
    l1: float = float("nan")
    l2: float = float("nan")
    l1_limit: float = float("nan")
    l2_limit: float = float("nan")
    reason: str = ""

    @property
    def margin(self) -> float:
        """Smallest relative slack left on either side (negative if outside)."""
        out = []
        for L, lim in ((self.l1, self.l1_limit), (self.l2, self.l2_limit)):
            if np.isnan(lim):
                continue  # undefined when an earlier side already failed
            out.append(1.0 - L / lim if lim > 0 else (0.0 if L == 0 else -np.inf))
        return min(out) if out else float("nan")


def _within(L, limit):
    return L <= limit * (1.0 + LENGTH_RTOL)


def check_membership(H: ChannelMatrix, snr, xi: float, p: RatePoint) -> Membership:
    C = CapacityFn(_as_snr(snr))
    try:
        L1 = C.inverse(p.r1)
        L2 = C.inverse(p.r2)
    except RateUnreachable as exc:
        return Membership(False, reason=str(exc))
    lmax = geo.l1_max(H, xi)
    if not _within(L1, lmax):
        return Membership(False, L1, L2, lmax, float("nan"), "L1 exceeds L1_max")
    limit2 = geo.l2_xi(H, xi, min(L1, lmax))
    # The L1 slack feeds into L2 through the steepest face of the parallelogram.
    slack2 = LENGTH_RTOL * (limit2 + geo.l2_lipschitz(H) * L1)
    if not L2 <= limit2 + slack2:
        return Membership(False, L1, L2, lmax, limit2, "L2 exceeds L2(L1)")
    return Membership(True, L1, L2, lmax, limit2)


def contains(H: ChannelMatrix, snr, xi: float, p: RatePoint) -> bool:
    m = check_membership(H, snr, xi, p)
    if not m.inside:
        log.debug("rate point %s outside region (xi=%s): %s", p, xi, m.reason)
    return m.inside


def solve_alpha(H: ChannelMatrix, snr, xi: float, alpha: float):
    """Root x* of alpha*C(x) - C(L2(x)) on [0, L1_max] by bisection.

    Returns ``(x_star, RatePoint)``.  The function is increasing in x, so the
    bracket shrinks until it cannot be split any further in floating point.
    """
    if not alpha > 0:
        raise InvalidAlpha(f"alpha must be > 0, got {alpha}")
    lmax = geo.l1_max(H, xi)
    if lmax == 0.0:
        return 0.0, RatePoint(0.0, 0.0)
    C = CapacityFn(_as_snr(snr))

    def f(x):
        return alpha * C(x) - C(geo.l2_xi(H, xi, x))

    lo, hi = 0.0, lmax
    flo = f(lo)
    if flo >= 0.0:
        return 0.0, RatePoint(0.0, 0.0)
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    x_star = lo if abs(f(lo)) <= abs(f(hi)) else hi
    r = C(x_star)
    return x_star, RatePoint(r, alpha * r)


def r_alpha_max(H: ChannelMatrix, snr, xi: float, alpha: float) -> RatePoint:
    """Largest achievable pair of the form (r, alpha*r)."""
    return solve_alpha(H, snr, xi, alpha)[1]


def sym_rate(H: ChannelMatrix, snr, xi: float) -> float:
    """Maximum symmetric rate (alpha = 1), in bits per channel use."""
    return r_alpha_max(H, snr, xi, 1.0).r1


@dataclass
class ContainmentReport:
    xi: float
    l1_violation: float
    max_l2_violation: float
    max_rate_violation: float
    scale: float
    tol: float = 1e-12
    worst_x: float = field(default=float("nan"))

    @property
    def ok(self) -> bool:
        # Length violations are judged relative to the channel scale.
        return (self.l1_violation <= self.tol * self.scale
                and self.max_l2_violation <= self.tol * self.scale
                and self.max_rate_violation <= 1e-12)


def verify_containment(H: ChannelMatrix, snr, xi: float,
                       num_samples: int = DEFAULT_SAMPLES) -> ContainmentReport:
    """Check L1_max(xi) <= L1_max(1/2) and L2^xi(x) <= L2^{1/2}(x) on a grid."""
    C = CapacityFn(_as_snr(snr))
    xs = boundary_grid(H, xi, num_samples)
    l1_viol = max(0.0, geo.l1_max(H, xi) - geo.l1_max(H, 0.5))
    worst, worst_x, rate_worst = 0.0, float("nan"), 0.0
    for x in xs:
        a = geo.l2_xi(H, xi, x)
        b = geo.l2_xi(H, 0.5, min(x, geo.l1_max(H, 0.5)))
        if a - b > worst:
            worst, worst_x = a - b, float(x)
        rate_worst = max(rate_worst, C(a) - C(b))
    return ContainmentReport(xi, l1_viol, worst, rate_worst, H.scale, worst_x=worst_x)
