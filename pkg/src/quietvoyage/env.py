"""Ocean scene ingestion: route discretization, bathymetry, sound speed, mammals.

The scene is a 2D range-depth slice. Range runs along the ship track in
nautical miles (0 at the departure port), depth is positive down in meters
with a flat sea surface at z = 0. Everything loaded here is immutable and
safe to share across threads; all interpolation helpers are pure.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .units import NM_TO_M


class ScenarioError(ValueError):
    """Base class for scenario ingestion failures."""


class ParseError(ScenarioError):
    """The scenario file is not well-formed (bad JSON/CSV, missing keys)."""


class ValidationError(ScenarioError):
    """The scenario parsed but violates an invariant; message names it."""


class HearingGroup(str, Enum):
    """Marine mammal hearing groups with distinct audiogram parameters."""

    HF = "HF"    # high-frequency cetaceans
    VHF = "VHF"  # very-high-frequency cetaceans
    SI = "SI"    # sirenians
    PCW = "PCW"  # phocid carnivores in water
    OCW = "OCW"  # other marine carnivores in water


@dataclass(frozen=True)
class Route:
    """Fixed track split into equidistant sailing legs.

    ``n_waypoints`` waypoints bound ``n_waypoints - 1`` legs; the ship holds
    one decision speed per leg.
    """

    total_distance_nm: float
    n_waypoints: int

    def __post_init__(self):
        if self.n_waypoints < 2:
            raise ValidationError("route: n_waypoints must be >= 2")
        if not self.total_distance_nm > 0:
            raise ValidationError("route: total_distance_nm must be > 0")

    @property
    def n_legs(self) -> int:
        return self.n_waypoints - 1

    @property
    def leg_length_nm(self) -> float:
        return self.total_distance_nm / (self.n_waypoints - 1)

    def waypoint_ranges_nm(self) -> np.ndarray:
        """Waypoint positions {0, d, 2d, ..., total_distance} in NM."""
        w = np.linspace(0.0, self.total_distance_nm, self.n_waypoints)
        return w


def discretize_route(total_distance_nm: float, n_waypoints: int) -> Route:
    """Split a voyage distance into equidistant sailing legs."""
    return Route(total_distance_nm=float(total_distance_nm), n_waypoints=int(n_waypoints))


@dataclass(frozen=True)
class BathymetryProfile:
    """Seabed depth sampled along track, linearly interpolated between samples.

    Ranges must be strictly increasing and cover the whole route
    (first <= 0, last >= total distance); depths are positive down.
    """

    ranges_nm: np.ndarray
    depths_m: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.ranges_nm, dtype=float)
        d = np.asarray(self.depths_m, dtype=float)
        object.__setattr__(self, "ranges_nm", r)
        object.__setattr__(self, "depths_m", d)
        if r.ndim != 1 or d.shape != r.shape or r.size < 2:
            raise ValidationError("bathymetry: need matching 1-D range/depth samples (>= 2)")
        if not np.all(np.diff(r) > 0):
            raise ValidationError("bathymetry: ranges must be strictly increasing")
        if not np.all(d > 0):
            raise ValidationError("bathymetry: depths must be positive (positive down)")

    def coverage_nm(self) -> tuple[float, float]:
        return float(self.ranges_nm[0]), float(self.ranges_nm[-1])

    def depth_at(self, range_nm):
        """Seabed depth (m) at a track range (NM); exact at sample points."""
        r = np.asarray(range_nm, dtype=float)
        lo, hi = self.coverage_nm()
        if np.any(r < lo) or np.any(r > hi):
            raise ValidationError(
                f"bathymetry: range {r!r} outside coverage [{lo}, {hi}] NM"
            )
        out = np.interp(r, self.ranges_nm, self.depths_m)
        return float(out) if np.isscalar(range_nm) else out


@dataclass(frozen=True)
class SoundSpeedProfile:
    """Range-independent sound speed vs depth, piecewise linear.

    Below the deepest sample the last segment's gradient is extended
    (the standard deep isothermal-gradient choice for a truncated cast).
    """

    depths_m: np.ndarray
    speeds_ms: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.depths_m, dtype=float)
        c = np.asarray(self.speeds_ms, dtype=float)
        object.__setattr__(self, "depths_m", z)
        object.__setattr__(self, "speeds_ms", c)
        if z.ndim != 1 or c.shape != z.shape or z.size < 2:
            raise ValidationError("ssp: need matching 1-D depth/speed samples (>= 2)")
        if z[0] != 0.0:
            raise ValidationError("ssp: depths must start at 0")
        if not np.all(np.diff(z) > 0):
            raise ValidationError("ssp: depths must be strictly increasing")
        if np.any(c < 1400.0) or np.any(c > 1600.0):
            raise ValidationError("ssp: speeds must lie in [1400, 1600] m/s")
        grads = np.diff(c) / np.diff(z)
        object.__setattr__(self, "_grads", grads)

    def sound_speed_at(self, depth_m):
        """Sound speed (m/s) at depth (m, >= 0); extrapolates the last gradient."""
        z = np.asarray(depth_m, dtype=float)
        if np.any(z < 0):
            raise ValidationError("ssp: negative depth")
        out = np.interp(z, self.depths_m, self.speeds_ms)
        # np.interp clamps beyond the table; extend the last gradient instead.
        deep = z > self.depths_m[-1]
        if np.any(deep):
            tail = self.speeds_ms[-1] + self._grads[-1] * (z - self.depths_m[-1])
            out = np.where(deep, tail, out)
        return float(out) if np.isscalar(depth_m) else out

    def gradient_at(self, depth_m):
        """dc/dz (1/s) at depth; piecewise constant, last segment extended."""
        z = np.asarray(depth_m, dtype=float)
        idx = np.clip(np.searchsorted(self.depths_m, z, side="right") - 1, 0, self._grads.size - 1)
        out = self._grads[idx]
        return float(out) if np.isscalar(depth_m) else out


@dataclass(frozen=True)
class Mammal:
    """A fixed receiver: one animal with a known hearing group."""

    id: int
    range_nm: float
    depth_m: float
    group: HearingGroup


@dataclass(frozen=True)
class ShipCharacteristics:
    """Hull, engine and propulsion data for the resistance/power chain."""

    length_pp_m: float
    breadth_m: float
    draft_m: float
    block_coeff: float
    midship_coeff: float
    displacement_mt: float
    max_power_kw: float
    sfoc_curve: tuple[tuple[float, float], ...]  # (load fraction, MT/kWh)
    propulsion_efficiency: float = 0.70

    def __post_init__(self):
        positives = {
            "length_pp_m": self.length_pp_m,
            "breadth_m": self.breadth_m,
            "draft_m": self.draft_m,
            "displacement_mt": self.displacement_mt,
            "max_power_kw": self.max_power_kw,
            "propulsion_efficiency": self.propulsion_efficiency,
        }
        for name, value in positives.items():
            if not value > 0:
                raise ValidationError(f"ship: {name} must be positive")
        if not 0 < self.block_coeff < 1:
            raise ValidationError("ship: block_coeff must be in (0, 1)")
        if not 0 < self.midship_coeff <= 1:
            raise ValidationError("ship: midship_coeff must be in (0, 1]")
        curve = tuple((float(l), float(s)) for l, s in self.sfoc_curve)
        object.__setattr__(self, "sfoc_curve", curve)
        loads = [l for l, _ in curve]
        if len(curve) < 2:
            raise ValidationError("ship: sfoc_curve needs at least two points")
        if any(not 0 < l <= 1 for l in loads) or any(b <= a for a, b in zip(loads, loads[1:])):
            raise ValidationError("ship: sfoc_curve load fractions must be strictly increasing in (0, 1]")
        if any(s <= 0 for _, s in curve):
            raise ValidationError("ship: sfoc values must be positive")

    @property
    def prismatic_coeff(self) -> float:
        return self.block_coeff / self.midship_coeff


@dataclass(frozen=True)
class VoyageConstraints:
    """Operational envelope: arrival deadline and speed window in knots."""

    eta_h: float
    v_min_kt: float
    v_max_kt: float
    speed_grid_kt: tuple[float, ...] | None = None  # optional discrete admissible speeds

    def __post_init__(self):
        if not 0 < self.v_min_kt < self.v_max_kt:
            raise ValidationError("constraints: require 0 < v_min < v_max")
        if self.speed_grid_kt is not None:
            grid = tuple(float(v) for v in self.speed_grid_kt)
            object.__setattr__(self, "speed_grid_kt", grid)
            if any(not self.v_min_kt <= v <= self.v_max_kt for v in grid):
                raise ValidationError("constraints: speed_grid entries must lie within [v_min, v_max]")
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise ValidationError("constraints: speed_grid must be strictly increasing")


@dataclass(frozen=True)
class Scenario:
    """Immutable 2D ocean scene plus voyage and solver settings."""

    route: Route
    bathymetry: BathymetryProfile
    ssp: SoundSpeedProfile
    mammals: tuple[Mammal, ...]
    ship: ShipCharacteristics
    constraints: VoyageConstraints
    frequency_grid_hz: np.ndarray
    rng_seed: int = 0
    source_depth_m: float | None = None  # default: 70% of draft (propeller region)
    acoustics_params: dict = field(default_factory=dict)
    optimizer_params: dict = field(default_factory=dict)

    def __post_init__(self):
        f = np.asarray(self.frequency_grid_hz, dtype=float)
        object.__setattr__(self, "frequency_grid_hz", f)
        object.__setattr__(self, "mammals", tuple(self.mammals))
        lo, hi = self.bathymetry.coverage_nm()
        if lo > 0 or hi < self.route.total_distance_nm:
            raise ValidationError(
                "bathymetry: samples must cover the full route "
                f"(coverage [{lo}, {hi}] NM vs route {self.route.total_distance_nm} NM)"
            )
        if self.constraints.eta_h < self.route.total_distance_nm / self.constraints.v_max_kt:
            raise ValidationError(
                "constraints: eta_h below total_distance / v_max (infeasible by construction)"
            )
        for m in self.mammals:
            if not 0 <= m.range_nm <= self.route.total_distance_nm:
                raise ValidationError(f"mammal {m.id}: range {m.range_nm} NM outside route")
            seabed = self.bathymetry.depth_at(m.range_nm)
            if not 0 < m.depth_m < seabed:
                raise ValidationError(
                    f"mammal {m.id}: depth {m.depth_m} m not inside water column "
                    f"(seabed {seabed} m at {m.range_nm} NM)"
                )
        if f.ndim != 1 or f.size < 1:
            raise ValidationError("frequency_grid: need a 1-D list of frequencies")
        if np.any(f < 10.0) or np.any(f > 1.0e4):
            raise ValidationError("frequency_grid: frequencies must lie in [10, 1e4] Hz")
        if f.size > 1 and not np.all(np.diff(f) > 0):
            raise ValidationError("frequency_grid: frequencies must be strictly increasing")
        src = self.source_depth_m
        if src is None:
            src = 0.7 * self.ship.draft_m
            object.__setattr__(self, "source_depth_m", src)
        if not 0 < src < float(np.min(self.bathymetry.depths_m)):
            raise ValidationError("source_depth_m must sit inside the water column everywhere")

    @property
    def n_legs(self) -> int:
        return self.route.n_legs

    def waypoint_ranges_nm(self) -> np.ndarray:
        return self.route.waypoint_ranges_nm()


def default_frequency_grid() -> np.ndarray:
    """31 log-spaced frequencies, 10 per decade over [10, 1e4] Hz."""
    return np.logspace(1.0, 4.0, 31)


def scatter_mammals(
    route: Route,
    bathymetry: BathymetryProfile,
    n: int,
    rng_seed: int,
    groups: Sequence[HearingGroup] = tuple(HearingGroup),
) -> tuple[Mammal, ...]:
    """Deterministically scatter ``n`` mammals along the route.

    Positions are uniform in range; depths uniform within (5%, 95%) of the
    local water column so placement invariants hold by construction. The
    same seed always reproduces the same layout bit-for-bit.
    """
    if n < 0:
        raise ValidationError("scatter_mammals: n must be >= 0")
    rng = np.random.default_rng(rng_seed)
    mammals = []
    for i in range(n):
        r = float(rng.uniform(0.0, route.total_distance_nm))
        seabed = bathymetry.depth_at(r)
        z = float(rng.uniform(0.05 * seabed, 0.95 * seabed))
        g = groups[int(rng.integers(0, len(groups)))]
        mammals.append(Mammal(id=i, range_nm=r, depth_m=z, group=HearingGroup(g)))
    return tuple(mammals)


def _read_two_column_csv(path: Path, col_a: str, col_b: str) -> tuple[np.ndarray, np.ndarray]:
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or col_a not in reader.fieldnames or col_b not in reader.fieldnames:
                raise ParseError(f"{path}: expected columns {col_a},{col_b}")
            a, b = [], []
            for row in reader:
                a.append(float(row[col_a]))
                b.append(float(row[col_b]))
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    except ValueError as exc:
        raise ParseError(f"{path}: non-numeric value ({exc})") from exc
    return np.asarray(a), np.asarray(b)


def _require(mapping: dict, key: str, context: str):
    if key not in mapping:
        raise ParseError(f"{context}: missing required key '{key}'")
    return mapping[key]


def load_scenario(path: str | Path) -> Scenario:
    """Load and fully validate a scenario JSON file.

    Validation fails on the first violated invariant rather than clamping;
    see docs/scenario_schema.md for the normative schema.
    """
    path = Path(path)
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise ParseError(f"{path}: top level must be a JSON object")

    route_cfg = _require(raw, "route", str(path))
    route = discretize_route(
        _require(route_cfg, "total_distance_nm", "route"),
        _require(route_cfg, "n_waypoints", "route"),
    )

    bathy_cfg = _require(raw, "bathymetry", str(path))
    if "csv" in bathy_cfg:
        r, d = _read_two_column_csv(path.parent / bathy_cfg["csv"], "range_nm", "depth_m")
    else:
        samples = np.asarray(_require(bathy_cfg, "samples", "bathymetry"), dtype=float)
        if samples.ndim != 2 or samples.shape[1] != 2:
            raise ParseError("bathymetry: samples must be a list of [range_nm, depth_m] pairs")
        r, d = samples[:, 0], samples[:, 1]
    bathymetry = BathymetryProfile(ranges_nm=r, depths_m=d)

    ssp_cfg = _require(raw, "ssp", str(path))
    if "csv" in ssp_cfg:
        z, c = _read_two_column_csv(path.parent / ssp_cfg["csv"], "depth_m", "speed_ms")
    else:
        samples = np.asarray(_require(ssp_cfg, "samples", "ssp"), dtype=float)
        if samples.ndim != 2 or samples.shape[1] != 2:
            raise ParseError("ssp: samples must be a list of [depth_m, speed_ms] pairs")
        z, c = samples[:, 0], samples[:, 1]
    ssp = SoundSpeedProfile(depths_m=z, speeds_ms=c)

    ship_cfg = _require(raw, "ship", str(path))
    sfoc = ship_cfg.get("sfoc_curve")
    if sfoc is None:
        from .fuel import default_sfoc_curve

        sfoc = default_sfoc_curve()
    ship = ShipCharacteristics(
        length_pp_m=_require(ship_cfg, "length_pp_m", "ship"),
        breadth_m=_require(ship_cfg, "breadth_m", "ship"),
        draft_m=_require(ship_cfg, "draft_m", "ship"),
        block_coeff=_require(ship_cfg, "block_coeff", "ship"),
        midship_coeff=_require(ship_cfg, "midship_coeff", "ship"),
        displacement_mt=_require(ship_cfg, "displacement_mt", "ship"),
        max_power_kw=_require(ship_cfg, "max_power_kw", "ship"),
        sfoc_curve=tuple((float(l), float(s)) for l, s in sfoc),
        propulsion_efficiency=float(ship_cfg.get("propulsion_efficiency", 0.70)),
    )

    con_cfg = _require(raw, "constraints", str(path))
    grid = con_cfg.get("speed_grid_kt")
    constraints = VoyageConstraints(
        eta_h=float(_require(con_cfg, "eta_h", "constraints")),
        v_min_kt=float(_require(con_cfg, "v_min_kt", "constraints")),
        v_max_kt=float(_require(con_cfg, "v_max_kt", "constraints")),
        speed_grid_kt=tuple(float(v) for v in grid) if grid is not None else None,
    )

    rng_seed = int(raw.get("rng_seed", 0))
    mam_cfg = raw.get("mammals", [])
    if isinstance(mam_cfg, dict):
        # {"scatter": {"n": 25, "seed": 7}} places mammals reproducibly.
        sc = _require(mam_cfg, "scatter", "mammals")
        mammals = scatter_mammals(
            route,
            bathymetry,
            int(_require(sc, "n", "mammals.scatter")),
            int(sc.get("seed", rng_seed)),
        )
    else:
        mammals = tuple(
            Mammal(
                id=int(m.get("id", i)),
                range_nm=float(_require(m, "range_nm", f"mammal[{i}]")),
                depth_m=float(_require(m, "depth_m", f"mammal[{i}]")),
                group=HearingGroup(_require(m, "group", f"mammal[{i}]")),
            )
            for i, m in enumerate(mam_cfg)
        )

    freq_cfg = raw.get("frequency_grid_hz")
    if freq_cfg is None:
        freqs = default_frequency_grid()
    elif isinstance(freq_cfg, dict):
        freqs = np.logspace(
            math.log10(float(_require(freq_cfg, "f_min_hz", "frequency_grid"))),
            math.log10(float(_require(freq_cfg, "f_max_hz", "frequency_grid"))),
            int(_require(freq_cfg, "points", "frequency_grid")),
        )
    else:
        freqs = np.asarray(freq_cfg, dtype=float)

    return Scenario(
        route=route,
        bathymetry=bathymetry,
        ssp=ssp,
        mammals=mammals,
        ship=ship,
        constraints=constraints,
        frequency_grid_hz=freqs,
        rng_seed=rng_seed,
        source_depth_m=raw.get("source_depth_m"),
        acoustics_params=dict(raw.get("acoustics", {})),
        optimizer_params=dict(raw.get("optimizer", {})),
    )
