"""Flat ``key = value`` scenario files.

Lines are ``key = value``; ``#`` starts a comment.  Units: metres, degrees,
dB, bits per channel use.

Channel (give either ``H`` or layout keys, not both):

    H                   literal 2x2 gains, "h11,h12;h21,h22"
    room                room size x,y,z in m           (default 5,5,3)
    led_separation      m, LEDs centred on the ceiling  (default 0.6)
    user_height         PD height in m                  (default 0.5)
    user1_displacement  signed offset from origin in m  (default -2.0)
    user2_displacement                                   (default 2.0)
    pd_area             m^2                             (default 1e-4)
    fov_deg             receiver half field of view     (default 60)
    refractive_index    concentrator lens index         (default 1.5)
    semi_angle_deg      LED semi-angle at half power    (default 70)
    filter_gain         optical filter gain             (default 1)

Link and commands:

    snr_db              P0/sigma in dB                  (default 70)
    db_convention       power | amplitude               (default power)
    xi                  one value or comma list         (default 0.5)
    xi_grid             start:stop:count for symrate    (default 0:1:101)
    num_samples         boundary samples per xi         (default 512)
    d1_range, d2_range  start:stop:step displacements   (default -2.5:2.5:0.1)
    displacement_range  start:stop:step for loss        (default 0:0.8:0.02)
    direction           inward | outward | worst        (default worst)
    targets             r1,r2 target rates in bits      (simulate)
    num_symbols         simulated channel uses          (default 1000000)
    batch_size          symbols per RNG batch           (default 65536)
    seed                RNG seed                        (default 0)
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .capacity import SnrRatio
from .channel_model import LambertianParams, RoomLayout, build_channel
from .errors import ConfigError
from .geometry import ChannelMatrix, canonicalize

LAYOUT_KEYS = {"room", "led_separation", "user_height", "user1_displacement", "user2_displacement"}
LAMBERT_KEYS = {"pd_area", "fov_deg", "refractive_index", "semi_angle_deg", "filter_gain"}
OTHER_KEYS = {
    "H", "snr_db", "db_convention", "xi", "xi_grid", "num_samples", "d1_range", "d2_range",
    "displacement_range", "direction", "targets", "num_symbols", "batch_size", "seed",
}
KNOWN_KEYS = LAYOUT_KEYS | LAMBERT_KEYS | OTHER_KEYS


def parse_text(text: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        out[key] = value
    return out


def _float(s, key):
    try:
        v = float(s)
    except ValueError:
        raise ConfigError(f"{key}: not a number: {s!r}") from None
    if not math.isfinite(v):
        raise ConfigError(f"{key}: must be finite, got {s!r}")
    return v


def _floats(s, key):
    return [_float(p, key) for p in s.split(",") if p.strip()]


def _int(s, key):
    try:
        return int(s)
    except ValueError:
        raise ConfigError(f"{key}: not an integer: {s!r}") from None


def _step_range(s, key):
    parts = s.split(":")
    if len(parts) != 3:
        raise ConfigError(f"{key}: expected start:stop:step, got {s!r}")
    a, b, h = (_float(p, key) for p in parts)
    if h <= 0 or b < a:
        raise ConfigError(f"{key}: need step > 0 and stop >= start")
    n = int(math.floor((b - a) / h + 1e-9)) + 1
    return np.round(a + h * np.arange(n), 12)


def _count_range(s, key):
    parts = s.split(":")
    if len(parts) != 3:
        raise ConfigError(f"{key}: expected start:stop:count, got {s!r}")
    a, b = _float(parts[0], key), _float(parts[1], key)
    n = _int(parts[2], key)
    if n < 1:
        raise ConfigError(f"{key}: count must be >= 1")
    return np.linspace(a, b, n)


@dataclass
class ScenarioConfig:
    """Parsed scenario.  ``raw`` keeps the key/value strings for provenance."""

    raw: dict = field(default_factory=dict)
    literal_H: np.ndarray | None = None
    layout: RoomLayout | None = None
    params: LambertianParams = field(default_factory=LambertianParams)
    snr_db: float = 70.0
    db_convention: str = "power"
    xi: list = field(default_factory=lambda: [0.5])
    xi_grid: np.ndarray = field(default_factory=lambda: np.linspace(0.0, 1.0, 101))
    num_samples: int = 512
    d1_range: np.ndarray = field(default_factory=lambda: _step_range("-2.5:2.5:0.1", "d1_range"))
    d2_range: np.ndarray = field(default_factory=lambda: _step_range("-2.5:2.5:0.1", "d2_range"))
    displacement_range: np.ndarray = field(default_factory=lambda: _step_range("0:0.8:0.02", "displacement_range"))
    direction: str = "worst"
    targets: tuple | None = None
    num_symbols: int = 10**6
    batch_size: int = 1 << 16
    seed: int = 0

    @classmethod
    def from_text(cls, text: str, overrides: dict | None = None) -> "ScenarioConfig":
        kv = parse_text(text)
        for k, v in (overrides or {}).items():
            if k not in KNOWN_KEYS:
                raise ConfigError(f"unknown key {k!r}")
            kv[k] = v
        return cls.from_mapping(kv)

    @classmethod
    def from_file(cls, path, overrides: dict | None = None) -> "ScenarioConfig":
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        return cls.from_text(text, overrides)

    @classmethod
    def from_mapping(cls, kv: dict) -> "ScenarioConfig":
        cfg = cls(raw=dict(kv))
        has_layout = bool(LAYOUT_KEYS & kv.keys())
        if "H" in kv:
            if has_layout:
                raise ConfigError("give either a literal H or layout keys, not both")
            rows = [r for r in kv["H"].split(";")]
            vals = [_floats(r, "H") for r in rows]
            if len(vals) != 2 or any(len(r) != 2 for r in vals):
                raise ConfigError("H must be 'h11,h12;h21,h22'")
            cfg.literal_H = np.array(vals)
        else:
            room = tuple(_floats(kv.get("room", "5,5,3"), "room"))
            if len(room) != 3:
                raise ConfigError("room must be x,y,z")
            try:
                cfg.layout = RoomLayout.linear(
                    _float(kv.get("user1_displacement", "-2.0"), "user1_displacement"),
                    _float(kv.get("user2_displacement", "2.0"), "user2_displacement"),
                    led_separation=_float(kv.get("led_separation", "0.6"), "led_separation"),
                    user_height=_float(kv.get("user_height", "0.5"), "user_height"),
                    room=room,
                )
            except ValueError as exc:
                raise ConfigError(f"invalid layout: {exc}") from None
        try:
            cfg.params = LambertianParams(
                pd_area=_float(kv.get("pd_area", "1e-4"), "pd_area"),
                fov_deg=_float(kv.get("fov_deg", "60"), "fov_deg"),
                lens_refractive_index=_float(kv.get("refractive_index", "1.5"), "refractive_index"),
                semi_angle_deg=_float(kv.get("semi_angle_deg", "70"), "semi_angle_deg"),
                filter_gain=_float(kv.get("filter_gain", "1"), "filter_gain"),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        cfg.snr_db = _float(kv.get("snr_db", "70"), "snr_db")
        cfg.db_convention = kv.get("db_convention", "power")
        if cfg.db_convention not in ("power", "amplitude"):
            raise ConfigError("db_convention must be 'power' or 'amplitude'")
        if "xi" in kv:
            cfg.xi = _floats(kv["xi"], "xi")
        if "xi_grid" in kv:
            cfg.xi_grid = _count_range(kv["xi_grid"], "xi_grid")
        for x in list(cfg.xi) + list(cfg.xi_grid):
            if not 0.0 <= x <= 1.0:
                raise ConfigError(f"xi values must lie in [0, 1], got {x}")
        if "num_samples" in kv:
            cfg.num_samples = _int(kv["num_samples"], "num_samples")
            if cfg.num_samples < 2:
                raise ConfigError("num_samples must be >= 2")
        for key in ("d1_range", "d2_range", "displacement_range"):
            if key in kv:
                setattr(cfg, key, _step_range(kv[key], key))
        cfg.direction = kv.get("direction", "worst")
        if cfg.direction not in ("inward", "outward", "worst"):
            raise ConfigError("direction must be inward, outward or worst")
        if "targets" in kv:
            t = _floats(kv["targets"], "targets")
            if len(t) != 2 or min(t) < 0:
                raise ConfigError("targets must be two nonnegative rates 'r1,r2'")
            cfg.targets = tuple(t)
        if "num_symbols" in kv:
            cfg.num_symbols = _int(kv["num_symbols"], "num_symbols")
        if "batch_size" in kv:
            cfg.batch_size = _int(kv["batch_size"], "batch_size")
        if cfg.num_symbols < 1 or cfg.batch_size < 1:
            raise ConfigError("num_symbols and batch_size must be positive")
        if "seed" in kv:
            cfg.seed = _int(kv["seed"], "seed")
        return cfg

    @property
    def snr(self) -> SnrRatio:
        return SnrRatio.from_db(self.snr_db, self.db_convention)

    def channel(self) -> ChannelMatrix:
        """Canonical H; raises SingularMatrix / DegenerateChannel."""
        if self.literal_H is not None:
            return canonicalize(self.literal_H)
        return build_channel(self.layout, self.params)

    def metadata(self) -> dict:
        """Every effective setting (defaults included) as JSON-ready values."""
        out = {
            "snr_db": self.snr_db,
            "db_convention": self.db_convention,
            "p0_over_sigma": self.snr.p0_over_sigma,
            "xi": list(self.xi),
            "xi_grid": [float(v) for v in self.xi_grid],
            "num_samples": self.num_samples,
            "d1_range": [float(v) for v in self.d1_range],
            "d2_range": [float(v) for v in self.d2_range],
            "displacement_range": [float(v) for v in self.displacement_range],
            "direction": self.direction,
            "targets": list(self.targets) if self.targets is not None else None,
            "num_symbols": self.num_symbols,
            "batch_size": self.batch_size,
            "seed": self.seed,
            "lambertian": asdict(self.params),
        }
        if self.literal_H is not None:
            out["H"] = self.literal_H.tolist()
        else:
            out["layout"] = asdict(self.layout)
        out["given"] = {k: self.raw[k] for k in sorted(self.raw)}
        return out
