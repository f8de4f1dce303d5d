"""Indoor line-of-sight Lambertian channel and user-placement sweeps.

Gain of LED ``i`` at PD ``k``::

    h = (m + 1) A / (2 pi d^2) * cos(phi)^m * Ts * g(psi) * cos(psi),  psi <= FOV
    m = -ln 2 / ln cos(semi_angle),   g(psi) = n^2 / sin(FOV)^2

with ``phi`` the irradiance angle off the LED axis (pointing down) and ``psi``
the incidence angle off the PD axis (pointing up).  PD responsivity is folded
in as 1, so the gains are used directly as the normalized H.

Placement sweeps put both LEDs on the ceiling and both PDs on one horizontal
line in the LEDs' vertical plane.  A user's *displacement* is its signed
offset along that line from the origin, the foot of the LEDs' perpendicular
bisector (positive = towards LED 2's side).
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DegenerateChannel, SingularMatrix
from .geometry import ChannelMatrix, canonicalize
from .rate_region import sym_rate

Point = tuple[float, float, float]


@dataclass(frozen=True)
class LambertianParams:
    pd_area: float = 1e-4  # m^2
    fov_deg: float = 60.0
    lens_refractive_index: float = 1.5
    semi_angle_deg: float = 70.0
    filter_gain: float = 1.0

    def __post_init__(self):
        if not 0 < self.fov_deg <= 90:
            raise ValueError("fov_deg must lie in (0, 90]")
        if not 0 < self.semi_angle_deg < 90:
            raise ValueError("semi_angle_deg must lie in (0, 90)")
        if self.pd_area <= 0:
            raise ValueError("pd_area must be positive")

    @property
    def lambertian_order(self) -> float:
        return -math.log(2.0) / math.log(math.cos(math.radians(self.semi_angle_deg)))

    @property
    def concentrator_gain(self) -> float:
        return self.lens_refractive_index ** 2 / math.sin(math.radians(self.fov_deg)) ** 2


@dataclass(frozen=True)
class RoomLayout:
    """Room box (metres) with two ceiling LEDs and two upward-facing PDs.

    Index 0 of ``pd_positions`` is user 1.  ``led_positions`` are physical
    LEDs; canonicalization may relabel them.
    """

    room: Point = (5.0, 5.0, 3.0)
    led_positions: tuple[Point, Point] = ((2.2, 2.5, 3.0), (2.8, 2.5, 3.0))
    pd_positions: tuple[Point, Point] = ((0.5, 2.5, 0.5), (4.5, 2.5, 0.5))

    def __post_init__(self):
        pts = list(self.led_positions) + list(self.pd_positions)
        for p in pts:
            if len(p) != 3:
                raise ValueError(f"positions must be 3D, got {p}")
            if not all(-1e-12 <= c <= L + 1e-12 for c, L in zip(p, self.room)):
                raise ValueError(f"point {p} lies outside the room {self.room}")
        top = min(p[2] for p in self.led_positions)
        if any(p[2] >= top for p in self.pd_positions):
            raise ValueError("photodiodes must be below the LEDs")

    @classmethod
    def linear(cls, d1: float, d2: float, led_separation: float = 0.6,
               user_height: float = 0.5, room: Point = (5.0, 5.0, 3.0)) -> "RoomLayout":
        """Centred LED pair on the ceiling, users at displacements d1, d2."""
        cx, cy, h = 0.5 * room[0], 0.5 * room[1], room[2]
        leds = ((cx - 0.5 * led_separation, cy, h), (cx + 0.5 * led_separation, cy, h))
        pds = ((cx + d1, cy, user_height), (cx + d2, cy, user_height))
        return cls(tuple(room), leds, pds)

    @property
    def origin(self) -> Point:
        (a, b, _), (c, d, _) = self.led_positions
        return (0.5 * (a + c), 0.5 * (b + d), self.pd_positions[0][2])

    def displaced(self, d1: float, d2: float) -> "RoomLayout":
        """Same LEDs and PD height; users moved to displacements d1, d2."""
        ox, oy, oz = self.origin
        return replace(self, pd_positions=((ox + d1, oy, oz), (ox + d2, oy, oz)))


def los_gain(led, pd, params: LambertianParams = LambertianParams()) -> float:
    """LOS DC gain from a downward LED to an upward PD."""
    v = np.asarray(pd, dtype=float) - np.asarray(led, dtype=float)
    d = float(np.linalg.norm(v))
    if d == 0.0:
        raise ValueError("LED and PD coincide")
    cos_phi = -v[2] / d
    cos_psi = -v[2] / d
    if cos_phi <= 0.0 or cos_psi <= 0.0:
        return 0.0
    psi = math.degrees(math.acos(min(1.0, cos_psi)))
    if psi > params.fov_deg:
        return 0.0
    m = params.lambertian_order
    return ((m + 1.0) * params.pd_area / (2.0 * math.pi * d * d)
            * cos_phi ** m * params.filter_gain * params.concentrator_gain * cos_psi)


def raw_gains(layout: RoomLayout, params: LambertianParams = LambertianParams()) -> np.ndarray:
    """Uncanonicalized H with h[k, i] = gain(LED i -> PD k)."""
    return np.array([[los_gain(led, pd, params) for led in layout.led_positions]
                     for pd in layout.pd_positions])


def build_channel(layout: RoomLayout, params: LambertianParams = LambertianParams()) -> ChannelMatrix:
    return canonicalize(raw_gains(layout, params))


@dataclass
class SweepGrid:
    """Symmetric rate over a grid of user displacements (row = d1, col = d2)."""

    d1: np.ndarray
    d2: np.ndarray
    rate: np.ndarray
    singular: np.ndarray
    xi: float
    meta: dict = field(default_factory=dict)

    def argmax(self) -> tuple[float, float]:
        i, j = np.unravel_index(int(np.argmax(self.rate)), self.rate.shape)
        return float(self.d1[i]), float(self.d2[j])


def _cell(layout, params, snr, xi, d1, d2):
    try:
        H = build_channel(layout.displaced(d1, d2), params)
    except (SingularMatrix, DegenerateChannel):
        return 0.0, True
    return sym_rate(H, snr, xi), False


def sweep_displacement(layout: RoomLayout, params: LambertianParams, snr, xi: float,
                       d1_values, d2_values, threads: int = 1) -> SweepGrid:
    """Symmetric rate for every (d1, d2); singular cells report 0 and a flag."""
    d1 = np.asarray(d1_values, dtype=float)
    d2 = np.asarray(d2_values, dtype=float)
    cells = [(a, b) for a in d1 for b in d2]
    work = lambda ab: _cell(layout, params, snr, xi, ab[0], ab[1])  # noqa: E731
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            out = list(pool.map(work, cells))
    else:
        out = [work(c) for c in cells]
    rate = np.array([r for r, _ in out]).reshape(len(d1), len(d2))
    sing = np.array([s for _, s in out]).reshape(len(d1), len(d2))
    return SweepGrid(d1, d2, rate, sing, xi)


def antisymmetric_rate(layout: RoomLayout, params, snr, xi, t: float) -> float:
    """Symmetric rate with users at (-t, +t)."""
    return _cell(layout, params, snr, xi, -t, t)[0]


def find_optimum(layout: RoomLayout, params: LambertianParams, snr, xi: float,
                 coarse_step: float = 0.05) -> tuple[float, float]:
    """Best antisymmetric placement (-t*, t*) and its symmetric rate.

    A coarse scan over t locates the peak, then a bounded scalar search
    refines it inside the neighbouring cells.
    """
    ox = layout.origin[0]
    t_max = min(ox, layout.room[0] - ox)
    ts = np.arange(coarse_step, t_max + 1e-12, coarse_step)
    rates = [antisymmetric_rate(layout, params, snr, xi, t) for t in ts]
    k = int(np.argmax(rates))
    lo = ts[max(k - 1, 0)]
    hi = ts[min(k + 1, len(ts) - 1)]
    res = minimize_scalar(lambda t: -antisymmetric_rate(layout, params, snr, xi, t),
                          bounds=(lo, hi), method="bounded", options={"xatol": 1e-6})
    t_star, r_star = float(res.x), float(-res.fun)
    if rates[k] > r_star:
        t_star, r_star = float(ts[k]), float(rates[k])
    return t_star, r_star


@dataclass
class LossCurve:
    displacement: np.ndarray
    loss_pct: np.ndarray
    xi: float
    t_opt: float
    rate_opt: float
    direction: str

    def coverage_radius(self, threshold_pct: float) -> float:
        """Largest displacement before the loss first exceeds the threshold
        (linear interpolation between samples)."""
        d, L = self.displacement, self.loss_pct
        above = np.nonzero(L > threshold_pct)[0]
        if len(above) == 0:
            return float(d[-1])
        k = int(above[0])
        if k == 0:
            return float(d[0])
        return float(np.interp(threshold_pct, [L[k - 1], L[k]], [d[k - 1], d[k]]))


_DIRECTIONS = ("inward", "outward", "worst")


def percentage_loss_curve(layout: RoomLayout, params: LambertianParams, snr, xi: float,
                          displacements, direction: str = "worst",
                          optimum: tuple[float, float] | None = None) -> LossCurve:
    """Percentage loss of the symmetric rate as both users move ``d`` away
    from the optimal antisymmetric placement.

    ``direction`` selects whether the users move towards each other
    ("inward"), apart ("outward"), or the larger loss of the two ("worst").
    Positions falling outside the room give NaN.
    """
    if direction not in _DIRECTIONS:
        raise ValueError(f"direction must be one of {_DIRECTIONS}")
    t_opt, r_opt = optimum if optimum is not None else find_optimum(layout, params, snr, xi)
    ox = layout.origin[0]
    t_max = min(ox, layout.room[0] - ox)
    ds = np.asarray(displacements, dtype=float)
    out = []
    for d in ds:
        cands = []
        if direction in ("inward", "worst"):
            cands.append(t_opt - d)
        if direction in ("outward", "worst"):
            cands.append(t_opt + d)
        losses = []
        for t in cands:
            if abs(t) > t_max + 1e-12:
                continue
            r = antisymmetric_rate(layout, params, snr, xi, t)
            losses.append(100.0 * (1.0 - r / r_opt))
        out.append(max(losses) if losses else float("nan"))
    return LossCurve(ds, np.array(out), xi, t_opt, r_opt, direction)
