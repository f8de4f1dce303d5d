"""Pure-Python/numpy twin of the compiled kernels in ``_kernels.pyx``.

Used when the extension is not built, or when ``VLCZF_PURE_PYTHON=1``.
"""
import math

import numpy as np
from scipy.special import ndtr

BACKEND = "python"

SMALL_A = 1.0
PANEL = 1.0

_XQ, _WQ = np.polynomial.legendre.leggauss(16)
_XS, _WS = np.polynomial.legendre.leggauss(12)
_HALF_LOG_2PI_E = 0.5 * math.log(2.0 * math.pi * math.e)


def _panels(lo, hi):
    npan = math.ceil((hi - lo) / PANEL)
    edges = np.linspace(lo, hi, npan + 1)
    half = 0.5 * np.diff(edges)[:, None]
    nodes = edges[:-1, None] + half + half * _XQ
    return nodes.ravel(), (half * _WQ).ravel()


def _mi_large(a, width):
    y, w = _panels(-width, min(0.5 * a, width))
    f = (ndtr(y) - ndtr(y - a)) / a
    pos = f > 0.0
    acc = -np.sum(w[pos] * f[pos] * np.log(f[pos]))
    if 0.5 * a > width:
        acc += (0.5 * a - width) / a * math.log(a)
    return 2.0 * acc - _HALF_LOG_2PI_E


def _mi_small(a, width):
    z, w = _panels(0.0, 0.5 * a + width)
    t = 0.5 * a * _XS
    em = 0.5 * np.expm1(np.outer(z, t) - 0.5 * t * t) @ _WS
    g = np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
    acc = np.sum(w * g * (1.0 + em) * np.log1p(em))
    return a * a / 24.0 - 2.0 * acc


def capacity_nats(a, width=8.0):
    """Mutual information (nats) of Y = U + N, U ~ Unif[0, a], N ~ N(0, 1)."""
    if a <= 0.0:
        return 0.0
    if a <= SMALL_A:
        return float(_mi_small(a, width))
    return float(_mi_large(a, width))


def _rect_ok(inv, c1, c2, w1, w2, tol):
    for s1 in (-0.5, 0.5):
        for s2 in (-0.5, 0.5):
            u1 = c1 + s1 * w1
            u2 = c2 + s2 * w2
            x1 = inv[0] * u1 + inv[1] * u2
            x2 = inv[2] * u1 + inv[3] * u2
            if not (-tol <= x1 <= 1.0 + tol and -tol <= x2 <= 1.0 + tol):
                return False
    return True


def max_extent(h11, h12, h21, h22, c1, c2, fixed, axis, step, tol=0.0):
    """Largest side along ``axis`` of a rectangle centred at (c1, c2) inside
    the parallelogram of H; see the compiled version."""
    det = h11 * h22 - h12 * h21
    inv = (h22 / det, -h12 / det, -h21 / det, h11 / det)
    if axis == 0:
        hi = 2.0 * (abs(h11) + abs(h12)) + 1.0
        ok = lambda L: _rect_ok(inv, c1, c2, L, fixed, tol)  # noqa: E731
    else:
        hi = 2.0 * (abs(h21) + abs(h22)) + 1.0
        ok = lambda L: _rect_ok(inv, c1, c2, fixed, L, tol)  # noqa: E731
    lo = 0.0
    if not ok(lo):
        return 0.0
    while hi - lo > step:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo
