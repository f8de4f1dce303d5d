# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: uniform-plus-Gaussian mutual information and the
brute-force rectangle-in-parallelogram extent search.

Mirrors :mod:`vlczf._kernels_py` function for function.
"""
from libc.math cimport erfc, exp, expm1, log, log1p, sqrt, ceil, fmin, fabs

import numpy as np

BACKEND = "cython"

cdef int NQ = 16
cdef int NQ_SMALL = 12
cdef double[16] _XQ
cdef double[16] _WQ
cdef double[12] _XS
cdef double[12] _WS
cdef double _SQRT1_2 = 0.7071067811865476
cdef double _INV_SQRT_2PI = 0.3989422804014327
cdef double _HALF_LOG_2PI_E = 1.4189385332046727

_xq, _wq = np.polynomial.legendre.leggauss(16)
_xs, _ws = np.polynomial.legendre.leggauss(12)
for _i in range(16):
    _XQ[_i] = _xq[_i]
    _WQ[_i] = _wq[_i]
for _i in range(12):
    _XS[_i] = _xs[_i]
    _WS[_i] = _ws[_i]

cdef double SMALL_A = 1.0
cdef double PANEL = 1.0


cdef inline double _ndtr(double z) noexcept nogil:
    return 0.5 * erfc(-z * _SQRT1_2)


cdef inline double _density(double y, double a) noexcept nogil:
    # f_Y(y) for Y = U + N, U ~ Unif[0, a], N ~ N(0, 1); reflected so the
    # difference is always taken in the lower tail.
    if y > 0.5 * a:
        y = a - y
    return (_ndtr(y) - _ndtr(y - a)) / a


cdef double _mi_large(double a, double width) noexcept nogil:
    # h(Y) - h(N), h(Y) integrated over [-width, a/2] and doubled by symmetry.
    cdef double hi = fmin(0.5 * a, width)
    cdef int npan = <int> ceil((hi + width) / PANEL)
    cdef double step = (hi + width) / npan
    cdef double acc = 0.0, lo, mid, half, y, f
    cdef int p, k
    for p in range(npan):
        lo = -width + p * step
        half = 0.5 * step
        mid = lo + half
        for k in range(NQ):
            y = mid + half * _XQ[k]
            f = _density(y, a)
            if f > 0.0:
                acc -= half * _WQ[k] * f * log(f)
    if 0.5 * a > width:
        acc += (0.5 * a - width) / a * log(a)
    return 2.0 * acc - _HALF_LOG_2PI_E


cdef double _mi_small(double a, double width) noexcept nogil:
    # a^2/24 - D(f_Y || N(a/2, 1)); the likelihood ratio against the centred
    # Gaussian is O(a^2) from 1 and is integrated without cancellation.
    cdef double hi = 0.5 * a + width
    cdef int npan = <int> ceil(hi / PANEL)
    cdef double step = hi / npan
    cdef double acc = 0.0, lo, mid, half, z, g, em, t, r, lr
    cdef int p, k, j
    for p in range(npan):
        lo = p * step
        half = 0.5 * step
        mid = lo + half
        for k in range(NQ):
            z = mid + half * _XQ[k]
            g = _INV_SQRT_2PI * exp(-0.5 * z * z)
            em = 0.0
            for j in range(NQ_SMALL):
                t = 0.5 * a * _XS[j]
                em += 0.5 * _WS[j] * expm1(t * z - 0.5 * t * t)
            lr = log1p(em)
            r = 1.0 + em
            acc += half * _WQ[k] * g * r * lr
    return a * a / 24.0 - 2.0 * acc


cpdef double capacity_nats(double a, double width=8.0) noexcept nogil:
    """Mutual information (nats) of Y = U + N, U ~ Unif[0, a], N ~ N(0, 1)."""
    if a <= 0.0:
        return 0.0
    if a <= SMALL_A:
        return _mi_small(a, width)
    return _mi_large(a, width)


cdef inline bint _inside(double i11, double i12, double i21, double i22,
                         double u1, double u2, double tol) noexcept nogil:
    cdef double x1 = i11 * u1 + i12 * u2
    cdef double x2 = i21 * u1 + i22 * u2
    return -tol <= x1 <= 1.0 + tol and -tol <= x2 <= 1.0 + tol


cdef bint _rect_ok(double i11, double i12, double i21, double i22,
                   double c1, double c2, double w1, double w2, double tol) noexcept nogil:
    return (_inside(i11, i12, i21, i22, c1 - 0.5 * w1, c2 - 0.5 * w2, tol)
            and _inside(i11, i12, i21, i22, c1 + 0.5 * w1, c2 - 0.5 * w2, tol)
            and _inside(i11, i12, i21, i22, c1 - 0.5 * w1, c2 + 0.5 * w2, tol)
            and _inside(i11, i12, i21, i22, c1 + 0.5 * w1, c2 + 0.5 * w2, tol))


cpdef double max_extent(double h11, double h12, double h21, double h22,
                        double c1, double c2, double fixed, int axis,
                        double step, double tol=0.0) noexcept nogil:
    """Largest side along ``axis`` (0 -> u1, 1 -> u2) of a rectangle centred at
    (c1, c2) that stays inside the parallelogram of H.

    For ``axis == 0`` the u2 side is ``fixed`` (normally 0); for ``axis == 1``
    the u1 side is ``fixed``.  Bisection until the bracket is below ``step``.
    """
    cdef double det = h11 * h22 - h12 * h21
    cdef double i11 = h22 / det, i12 = -h12 / det
    cdef double i21 = -h21 / det, i22 = h11 / det
    cdef double lo = 0.0, hi, mid
    if axis == 0:
        hi = 2.0 * (fabs(h11) + fabs(h12)) + 1.0
        if not _rect_ok(i11, i12, i21, i22, c1, c2, 0.0, fixed, tol):
            return 0.0
        while hi - lo > step:
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if _rect_ok(i11, i12, i21, i22, c1, c2, mid, fixed, tol):
                lo = mid
            else:
                hi = mid
    else:
        hi = 2.0 * (fabs(h21) + fabs(h22)) + 1.0
        if not _rect_ok(i11, i12, i21, i22, c1, c2, fixed, 0.0, tol):
            return 0.0
        while hi - lo > step:
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if _rect_ok(i11, i12, i21, i22, c1, c2, fixed, mid, tol):
                lo = mid
            else:
                hi = mid
    return lo
