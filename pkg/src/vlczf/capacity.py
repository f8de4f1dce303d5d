"""Mutual information of the interval-constrained Gaussian channel.

``C(L, P0/sigma)`` is I(U; Y) for ``Y = U + N`` with ``U`` uniform on an
interval of length ``L`` and ``N ~ N(0, (sigma/P0)^2)``.  It depends on
``(L, P0/sigma)`` only through the product ``a = L * P0/sigma`` (the interval
length in noise standard deviations), so the numerical work is done once per
``a`` and memoized on it.

dB convention
-------------
``SnrRatio.from_db`` defaults to the *power* reading, ``10**(dB/10)``.  The
amplitude reading ``10**(dB/20)`` is available with ``convention="amplitude"``.
With the indoor Lambertian gains of :mod:`vlczf.channel_model` only the power
reading puts 70 dB in the operating regime where the symmetric rate drops by
about 11% between xi = 0.5 and xi = 0.4; the amplitude reading leaves the
channel at ~1e-6 bits per use.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.special import ndtr

from . import kernels
from .errors import NegativeLength, RateUnreachable

LOG2E = 1.0 / math.log(2.0)
#: Default upper bracket for the inverse, in noise standard deviations.
DEFAULT_A_CAP = 1e6


@dataclass(frozen=True)
class SnrRatio:
    """Peak-power-to-noise ratio P0/sigma as a linear amplitude factor."""

    p0_over_sigma: float

    def __post_init__(self):
        if not (self.p0_over_sigma > 0 and math.isfinite(self.p0_over_sigma)):
            raise ValueError(f"P0/sigma must be positive and finite, got {self.p0_over_sigma}")

    @classmethod
    def from_db(cls, db: float, convention: str = "power") -> "SnrRatio":
        if convention == "power":
            return cls(10.0 ** (db / 10.0))
        if convention == "amplitude":
            return cls(10.0 ** (db / 20.0))
        raise ValueError(f"unknown dB convention {convention!r}")

    @property
    def noise_std(self) -> float:
        """sigma/P0, the std of the normalized receiver noise."""
        return 1.0 / self.p0_over_sigma


def _as_snr(snr) -> SnrRatio:
    return snr if isinstance(snr, SnrRatio) else SnrRatio(float(snr))


def _quantize(a: float) -> float:
    return float(f"{a:.15e}")


@lru_cache(maxsize=1 << 16)
def _capacity_scaled(a: float, width: float) -> float:
    # MI is nonnegative; tiny a can round a hair below zero.
    return max(0.0, kernels.capacity_nats(a, width) * LOG2E)


@dataclass(frozen=True)
class CapacityFn:
    """Memoized ``L -> C(L, snr)`` in bits per channel use, with inverse.

    Args:
        snr: P0/sigma.
        width: integration truncation, in noise standard deviations, beyond
            each end of the input interval.
        a_cap: largest interval length (in noise stds) the inverse searches.
    """

    snr: SnrRatio
    width: float = 8.0
    a_cap: float = DEFAULT_A_CAP

    def scaled(self, a: float) -> float:
        """C as a function of the scale-free length ``a = L * P0/sigma``."""
        if a < 0:
            raise NegativeLength(f"interval length must be >= 0, got {a}")
        if a == 0.0:
            return 0.0
        return _capacity_scaled(_quantize(a), self.width)

    def __call__(self, L: float) -> float:
        if L < 0:
            raise NegativeLength(f"interval length must be >= 0, got {L}")
        return self.scaled(L * self.snr.p0_over_sigma)

    def max_rate(self) -> float:
        return self.scaled(self.a_cap)

    def inverse(self, R: float) -> float:
        """Interval length L with C(L) = R (bracketing plus Brent's method)."""
        if R < 0:
            raise ValueError(f"rate must be >= 0, got {R}")
        if R == 0.0:
            return 0.0
        if R > self.max_rate():
            raise RateUnreachable(
                f"R = {R} bits exceeds C(a_cap = {self.a_cap:g}) = {self.max_rate():.6f} bits"
            )
        hi = 1.0
        while self.scaled(hi) < R and hi < self.a_cap:
            hi = min(2.0 * hi, self.a_cap)
        lo = 0.0 if hi == 1.0 else 0.5 * hi
        a = brentq(lambda t: self.scaled(t) - R, lo, hi, xtol=1e-300, rtol=1e-14, maxiter=400)
        return a * self.snr.noise_std


def capacity(L: float, snr) -> float:
    """C(L, P0/sigma) in bits per channel use."""
    return CapacityFn(_as_snr(snr))(L)


def capacity_inverse(R: float, snr) -> float:
    return CapacityFn(_as_snr(snr)).inverse(R)


def _log_density_scaled(y, a):
    """log f_Y for Y = U + N, U ~ Unif[0, a], N ~ N(0, 1) (natural log).

    The upper half is reflected onto the lower one so the CDF difference is
    always formed in the lower tail.
    """
    y = np.asarray(y, dtype=float)
    z = np.where(y > 0.5 * a, a - y, y)
    mass = ndtr(z) - ndtr(z - a)
    return np.log(mass) - math.log(a)


def output_log_density(y, L: float, snr) -> np.ndarray:
    """log f_Y(y) in nats for y in the original (unnormalized) units."""
    snr = _as_snr(snr)
    k = snr.p0_over_sigma
    return _log_density_scaled(np.asarray(y) * k, L * k) + math.log(k)


def information_density_bits(u, y, L: float, snr) -> np.ndarray:
    """Per-sample log2 f(y|u)/f(y) for u in an interval of length ``L``.

    ``u`` must be measured from the interval's left end.
    """
    snr = _as_snr(snr)
    k = snr.p0_over_sigma
    n = (np.asarray(y) - np.asarray(u)) * k
    log_cond = -0.5 * n * n - 0.5 * math.log(2.0 * math.pi)
    return (log_cond - _log_density_scaled(np.asarray(y) * k, L * k)) * LOG2E


def mc_mutual_information(L: float, snr, num_samples: int = 10**7, seed=0,
                          chunk: int = 1 << 20) -> float:
    """Monte-Carlo estimate of C(L, snr) from exact conditional/marginal densities.

    Independent of the quadrature in :func:`capacity`: draws (u, n) pairs and
    averages the information density.
    """
    if num_samples < 1:
        raise ValueError("num_samples must be positive")
    if L <= 0:
        return 0.0
    return mc_mutual_information_stats(L, snr, num_samples, seed, chunk)[0]


def mc_mutual_information_stats(L, snr, num_samples=10**7, seed=0, chunk=1 << 20):
    """(estimate, standard error) of the Monte-Carlo MI estimate."""
    snr = _as_snr(snr)
    a = L * snr.p0_over_sigma
    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < num_samples:
        m = min(chunk, num_samples - done)
        u = rng.uniform(0.0, a, m)
        n = rng.standard_normal(m)
        dens = (-0.5 * n * n - 0.5 * math.log(2.0 * math.pi)
                - _log_density_scaled(u + n, a)) * LOG2E
        total += float(dens.sum())
        total_sq += float(np.dot(dens, dens))
        done += m
    mean = total / num_samples
    var = max(total_sq / num_samples - mean * mean, 0.0)
    return mean, math.sqrt(var / num_samples)


def epi_lower_bound(L: float, snr) -> float:
    """Entropy-power lower bound 0.5*log2(1 + (L*snr)^2 / (2*pi*e))."""
    a = L * _as_snr(snr).p0_over_sigma
    return 0.5 * math.log2(1.0 + a * a / (2.0 * math.pi * math.e))
