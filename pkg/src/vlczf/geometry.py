"""Feasible-set geometry of the ZF-precoded 2x2 channel.

With ZF precoding the information vector is ``u = H x'`` with every normalized
LED power ``x'_i`` in [0, 1], so ``u`` ranges over the parallelogram spanned by
the LED channel vectors ``h1 = (h11, h21)`` and ``h2 = (h12, h22)``.  The
dimming target fixes the mean of ``u`` to ``D = xi (h1 + h2)``; achievable
symbol alphabets are axis-aligned rectangles centred at ``D`` that fit in the
parallelogram.  This module gives the closed-form extents of those rectangles
and a brute-force oracle for them.

LED labelling: LED 1 is the one whose channel vector is steeper, i.e.
``h21/h11 > h22/h12``, which is the same as ``det(H) < 0``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DegenerateChannel, InvalidXi, OutOfRange, SingularMatrix

#: Membership slack on normalized LED power x'.
DEFAULT_TOL = 1e-9
#: Relative slack when checking x against L1_max.
_X_SLACK = 1e-9
#: |det| below this fraction of max|h|^2 counts as singular.
_SINGULAR_RTOL = 1e-12


@dataclass(frozen=True)
class ChannelMatrix:
    """Canonical 2x2 channel gain matrix, rows = users, columns = LEDs.

    ``swapped`` records whether the physical LED columns were exchanged to
    reach ``det < 0``; precoded powers must be swapped back before driving the
    physical LEDs.
    """

    h11: float
    h12: float
    h21: float
    h22: float
    swapped: bool = False

    def __post_init__(self):
        vals = (self.h11, self.h12, self.h21, self.h22)
        if any(not np.isfinite(v) or v < 0 for v in vals):
            raise ValueError(f"channel gains must be finite and >= 0, got {vals}")
        if self.det >= 0:
            raise ValueError("ChannelMatrix must be canonical (det < 0); use canonicalize()")

    @property
    def det(self) -> float:
        return self.h11 * self.h22 - self.h12 * self.h21

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.h11, self.h12], [self.h21, self.h22]])

    @property
    def inverse(self) -> np.ndarray:
        d = self.det
        return np.array([[self.h22, -self.h12], [-self.h21, self.h11]]) / d

    @property
    def h1(self) -> np.ndarray:
        return np.array([self.h11, self.h21])

    @property
    def h2(self) -> np.ndarray:
        return np.array([self.h12, self.h22])

    @property
    def scale(self) -> float:
        return max(self.h11, self.h12, self.h21, self.h22)

    def physical_matrix(self) -> np.ndarray:
        """H with the LED columns in their original (pre-canonical) order."""
        m = self.matrix
        return m[:, ::-1] if self.swapped else m


@dataclass(frozen=True)
class DimmingPoint:
    u1: float
    u2: float
    xi: float


@dataclass(frozen=True)
class Rectangle:
    center: tuple[float, float]
    len_u1: float
    len_u2: float

    def corners(self):
        c1, c2 = self.center
        a, b = 0.5 * self.len_u1, 0.5 * self.len_u2
        return [(c1 - a, c2 - b), (c1 + a, c2 - b), (c1 - a, c2 + b), (c1 + a, c2 + b)]


def canonicalize(raw) -> ChannelMatrix:
    """Return the canonical ChannelMatrix for a raw nonnegative 2x2 matrix.

    Columns (LEDs) are swapped when ``det(raw) > 0``; rows (users) are never
    permuted.

    Raises:
        DegenerateChannel: a column is identically zero.
        SingularMatrix: the determinant vanishes (parallel channel vectors).
    """
    m = np.asarray(raw, dtype=float)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)) or np.any(m < 0):
        raise ValueError("channel gains must be finite and nonnegative")
    if np.any(np.all(m == 0.0, axis=0)):
        raise DegenerateChannel("a channel column is all zero")
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if abs(det) <= _SINGULAR_RTOL * float(np.max(m)) ** 2:
        raise SingularMatrix(f"det(H) = {det:g} is zero; ZF precoder undefined")
    swapped = bool(det > 0)
    if swapped:
        m = m[:, ::-1]
    return ChannelMatrix(float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1]), swapped)


def _check_xi(xi):
    if not (0.0 <= xi <= 1.0):
        raise InvalidXi(f"dimming target must lie in [0, 1], got {xi}")


def dimming_depth(xi: float) -> float:
    """min(xi, 1 - xi), snapped to 15 significant digits.

    The snap makes ``dimming_depth(1 - xi) == dimming_depth(xi)`` hold
    bit-for-bit for decimal inputs, where ``1 - (1 - xi)`` would be off by an ulp.
    """
    _check_xi(xi)
    return float(f"{min(xi, 1.0 - xi):.15g}")


def dimming_point(H: ChannelMatrix, xi: float) -> DimmingPoint:
    _check_xi(xi)
    return DimmingPoint(xi * (H.h11 + H.h12), xi * (H.h21 + H.h22), xi)


def in_parallelogram(H: ChannelMatrix, u, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``H^-1 u`` has both coordinates in [-tol, 1 + tol]."""
    d = H.det
    u1, u2 = u
    x1 = (H.h22 * u1 - H.h12 * u2) / d
    x2 = (-H.h21 * u1 + H.h11 * u2) / d
    return bool(-tol <= x1 <= 1.0 + tol and -tol <= x2 <= 1.0 + tol)


def rect_in_parallelogram(H: ChannelMatrix, r: Rectangle, tol: float = DEFAULT_TOL) -> bool:
    # The parallelogram is convex, so the corners decide.
    return all(in_parallelogram(H, c, tol) for c in r.corners())


def l1_max(H: ChannelMatrix, xi: float) -> float:
    """Widest u1-side of a rectangle centred at D(H, xi) inside the parallelogram."""
    m = dimming_depth(xi)
    return max(0.0, -2.0 * m * H.det / max(H.h21, H.h22))


def _check_x(H, xi, x):
    lmax = l1_max(H, xi)
    if x < 0 or x > lmax * (1.0 + _X_SLACK) + 1e-300:
        raise OutOfRange(f"x = {x!r} outside [0, L1_max = {lmax!r}]")
    return min(x, lmax)


def case_breakpoints(H: ChannelMatrix, xi: float) -> tuple[float, float]:
    """The kinks eta3, eta4 of the piecewise-linear L2 (unclamped)."""
    eta3 = 2.0 * xi * H.h12 - 2.0 * (1.0 - xi) * H.h11
    eta4 = 2.0 * (1.0 - xi) * H.h12 - 2.0 * xi * H.h11
    return eta3, eta4


def l2_up(H: ChannelMatrix, xi: float, x: float) -> float:
    """Largest upward half-height of a width-``x`` rectangle centred at D."""
    x = _check_x(H, xi, x)
    h11, h12, h21, h22 = H.h11, H.h12, H.h21, H.h22
    d = H.det
    mu1 = h11 / (h11 + h12)
    lower_face = (-xi * d - 0.5 * x * h21) / h11
    if xi <= mu1:
        val = lower_face
    else:
        eta3, _ = case_breakpoints(H, xi)
        if x <= eta3:
            val = (-(1.0 - xi) * d - 0.5 * x * h22) / h12
        else:
            val = lower_face
    return max(0.0, val)


def l2_down(H: ChannelMatrix, xi: float, x: float) -> float:
    """Largest downward half-height of a width-``x`` rectangle centred at D."""
    x = _check_x(H, xi, x)
    h11, h12, h21, h22 = H.h11, H.h12, H.h21, H.h22
    d = H.det
    mu2 = h12 / (h11 + h12)
    upper_face = (-(1.0 - xi) * d - 0.5 * x * h21) / h11
    if xi <= mu2:
        _, eta4 = case_breakpoints(H, xi)
        if x <= eta4:
            val = (-xi * d - 0.5 * x * h22) / h12
        else:
            val = upper_face
    else:
        val = upper_face
    return max(0.0, val)


def l2_xi(H: ChannelMatrix, xi: float, x: float) -> float:
    """Largest u2-side of a rectangle of u1-side ``x`` centred at D(H, xi)."""
    return 2.0 * min(l2_up(H, xi, x), l2_down(H, xi, x))


def l2_lipschitz(H: ChannelMatrix) -> float:
    """Upper bound on |dL2/dx| over every linear piece."""
    return max(H.h21 / H.h11 if H.h11 else np.inf, H.h22 / H.h12 if H.h12 else np.inf)


def oracle_l1_max(H: ChannelMatrix, xi: float, grid_step: float = 1e-6) -> float:
    """Brute-force L1_max: bisect the longest horizontal segment centred at D
    whose endpoints pass the membership test."""
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    D = dimming_point(H, xi)
    return kernels.max_extent(H.h11, H.h12, H.h21, H.h22, D.u1, D.u2, 0.0, 0, grid_step)


def oracle_l2_xi(H: ChannelMatrix, xi: float, x: float, grid_step: float = 1e-6) -> float:
    """Brute-force L2: bisect the tallest width-``x`` rectangle centred at D."""
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    D = dimming_point(H, xi)
    return kernels.max_extent(H.h11, H.h12, H.h21, H.h22, D.u1, D.u2, float(x), 1, grid_step)
