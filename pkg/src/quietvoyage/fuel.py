"""Still-water resistance, power chain and voyage fuel consumption.

Resistance follows the classic chart-based decomposition: ITTC-1957
friction line, a digitized residuary-coefficient chart keyed by
speed-length ratio and prismatic coefficient, and a constant incremental
(roughness) allowance. Effective power converts to brake power through a
constant propulsive efficiency, and an SFOC curve maps engine load to the
fuel rate.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .env import Scenario, ShipCharacteristics, ValidationError
from .units import KT_TO_MS, M_TO_FT

RHO_SEAWATER_KG_M3 = 1025.0
NU_SEAWATER_M2_S = 1.1883e-6  # kinematic viscosity at 15 C
DEFAULT_INCREMENTAL_COEFF = 0.0004  # hull-roughness allowance, large-ship class


class FuelModelError(ValueError):
    """Raised for inputs outside the fuel model's validity."""


def friction_coefficient(speed_ms: float, length_m: float, viscosity_m2_s: float = NU_SEAWATER_M2_S):
    """ITTC-1957 friction line C_f = 0.075 / (log10(Re) - 2)^2.

    Parameters
    ----------
    speed_ms : ship speed through water (m/s), > 0
    length_m : waterline length (m), > 0
    viscosity_m2_s : kinematic viscosity (m^2/s), > 0
    """
    v = np.asarray(speed_ms, dtype=float)
    if np.any(v <= 0) or length_m <= 0 or viscosity_m2_s <= 0:
        raise FuelModelError("friction_coefficient: all inputs must be positive")
    re = v * length_m / viscosity_m2_s
    if np.any(re <= 100.0):
        raise FuelModelError("friction_coefficient: Reynolds number <= 100 is degenerate")
    out = 0.075 / (np.log10(re) - 2.0) ** 2
    return float(out) if np.isscalar(speed_ms) else out


@dataclass(frozen=True)
class ResidualChart:
    """Digitized residuary-resistance chart C_r(speed-length ratio, C_p).

    The speed-length ratio is the classic v/sqrt(L) with v in knots and L
    in feet. Loading verifies C_r is nondecreasing in the speed-length
    ratio at every tabulated prismatic coefficient.
    """

    slr_values: np.ndarray
    cp_values: np.ndarray
    table: np.ndarray  # shape (len(slr_values), len(cp_values))

    def __post_init__(self):
        slr = np.asarray(self.slr_values, dtype=float)
        cp = np.asarray(self.cp_values, dtype=float)
        tab = np.asarray(self.table, dtype=float)
        object.__setattr__(self, "slr_values", slr)
        object.__setattr__(self, "cp_values", cp)
        object.__setattr__(self, "table", tab)
        if tab.shape != (slr.size, cp.size):
            raise FuelModelError("residual chart: table shape mismatch")
        if not (np.all(np.diff(slr) > 0) and np.all(np.diff(cp) > 0)):
            raise FuelModelError("residual chart: axes must be strictly increasing")
        if np.any(tab < 0):
            raise FuelModelError("residual chart: coefficients must be >= 0")
        if np.any(np.diff(tab, axis=0) < 0):
            raise FuelModelError("residual chart: C_r must be nondecreasing in speed-length ratio")

    def c_r(self, slr, cp: float):
        """Bilinear interpolation; raises outside table coverage."""
        s = np.asarray(slr, dtype=float)
        if np.any(s < self.slr_values[0]) or np.any(s > self.slr_values[-1]):
            raise FuelModelError(
                f"residual chart: speed-length ratio {slr!r} outside "
                f"[{self.slr_values[0]}, {self.slr_values[-1]}]"
            )
        if not self.cp_values[0] <= cp <= self.cp_values[-1]:
            raise FuelModelError(
                f"residual chart: prismatic coefficient {cp} outside "
                f"[{self.cp_values[0]}, {self.cp_values[-1]}]"
            )
        j = min(int(np.searchsorted(self.cp_values, cp, side="right") - 1), self.cp_values.size - 2)
        j = max(j, 0)
        t = (cp - self.cp_values[j]) / (self.cp_values[j + 1] - self.cp_values[j])
        col = (1.0 - t) * self.table[:, j] + t * self.table[:, j + 1]
        out = np.interp(s, self.slr_values, col)
        return float(out) if np.isscalar(slr) else out

    @classmethod
    def from_csv(cls, path: str | Path) -> "ResidualChart":
        rows = []
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            for row in reader:
                rows.append(
                    (float(row["speed_length_ratio"]), float(row["prismatic_coeff"]), float(row["c_r"]))
                )
        slr = np.array(sorted({r[0] for r in rows}))
        cp = np.array(sorted({r[1] for r in rows}))
        table = np.full((slr.size, cp.size), np.nan)
        for s, p, v in rows:
            table[np.searchsorted(slr, s), np.searchsorted(cp, p)] = v
        if np.any(np.isnan(table)):
            raise FuelModelError(f"{path}: chart grid is incomplete")
        return cls(slr_values=slr, cp_values=cp, table=table)


_DEFAULT_CHART: ResidualChart | None = None


def load_residual_chart(path: str | Path | None = None) -> ResidualChart:
    """Load a residual chart CSV; defaults to the packaged chart (cached)."""
    global _DEFAULT_CHART
    if path is not None:
        return ResidualChart.from_csv(path)
    if _DEFAULT_CHART is None:
        with resources.as_file(resources.files("quietvoyage.data") / "lap_keller_cr.csv") as p:
            _DEFAULT_CHART = ResidualChart.from_csv(p)
    return _DEFAULT_CHART


def default_sfoc_curve() -> tuple[tuple[float, float], ...]:
    """Packaged SFOC curve as (load fraction, MT/kWh) pairs."""
    with resources.as_file(resources.files("quietvoyage.data") / "sfoc_curve.csv") as p:
        with open(p, newline="") as fh:
            reader = csv.DictReader(fh)
            curve = tuple(
                (float(row["load_fraction"]), float(row["sfoc_mt_per_kwh"])) for row in reader
            )
    return curve


def speed_length_ratio(speed_kt: float, length_m: float):
    """v/sqrt(L) with v in knots, L in feet (chart abscissa convention)."""
    return np.asarray(speed_kt, dtype=float) / math.sqrt(length_m * M_TO_FT)


def residual_coefficient(speed_ms, ship: ShipCharacteristics, chart: ResidualChart):
    """Residuary coefficient from the digitized chart at the ship's C_p."""
    v_kt = np.asarray(speed_ms, dtype=float) / KT_TO_MS
    slr = speed_length_ratio(v_kt, ship.length_pp_m)
    out = chart.c_r(slr, ship.prismatic_coeff)
    return float(out) if np.isscalar(speed_ms) else out


def wetted_surface_m2(ship: ShipCharacteristics) -> float:
    """Denny-Mumford estimate S = 1.025 * Lpp * (Cb * B + 1.7 * T)."""
    return 1.025 * ship.length_pp_m * (ship.block_coeff * ship.breadth_m + 1.7 * ship.draft_m)


@dataclass(frozen=True)
class ResistanceBreakdown:
    """Coefficients and assembled still-water resistance at one speed."""

    c_f: float
    c_r: float
    c_a: float
    wetted_surface_m2: float
    speed_ms: float
    r_total_n: float


def total_resistance(
    speed_kt: float,
    ship: ShipCharacteristics,
    chart: ResidualChart | None = None,
    c_a: float = DEFAULT_INCREMENTAL_COEFF,
    rho: float = RHO_SEAWATER_KG_M3,
    viscosity: float = NU_SEAWATER_M2_S,
) -> ResistanceBreakdown:
    """Total resistance R = (C_f + C_r + C_a) * 0.5 * rho * v^2 * S."""
    if not speed_kt > 0:
        raise FuelModelError("total_resistance: speed must be positive")
    chart = chart if chart is not None else load_residual_chart()
    v = speed_kt * KT_TO_MS
    c_f = friction_coefficient(v, ship.length_pp_m, viscosity)
    c_r = residual_coefficient(v, ship, chart)
    s = wetted_surface_m2(ship)
    r = (c_f + c_r + c_a) * 0.5 * rho * v * v * s
    return ResistanceBreakdown(
        c_f=float(c_f), c_r=float(c_r), c_a=float(c_a),
        wetted_surface_m2=s, speed_ms=v, r_total_n=float(r),
    )


def brake_power_kw(speed_kt, ship: ShipCharacteristics, chart: ResidualChart | None = None):
    """Brake power P_B = P_E / eta_D with P_E = R_total * v, in kW."""
    chart = chart if chart is not None else load_residual_chart()
    v = np.asarray(speed_kt, dtype=float) * KT_TO_MS
    if np.any(v <= 0):
        raise FuelModelError("brake_power: speed must be positive")
    c_f = friction_coefficient(v, ship.length_pp_m)
    c_r = residual_coefficient(v, ship, chart)
    s = wetted_surface_m2(ship)
    r = (c_f + c_r + DEFAULT_INCREMENTAL_COEFF) * 0.5 * RHO_SEAWATER_KG_M3 * v * v * s
    p_e_kw = r * v / 1000.0
    out = p_e_kw / ship.propulsion_efficiency
    return float(out) if np.isscalar(speed_kt) else out


def sfoc_at(ship: ShipCharacteristics, load_fraction, strict: bool = False):
    """SFOC (MT/kWh) at an engine load fraction, piecewise linear.

    Outside the tabulated loads the curve is held flat unless ``strict``,
    in which case loads outside (0, 1] raise.
    """
    load = np.asarray(load_fraction, dtype=float)
    if strict and (np.any(load <= 0) or np.any(load > 1.0)):
        raise FuelModelError(f"sfoc: load fraction {load_fraction!r} outside (0, 1]")
    loads = np.array([l for l, _ in ship.sfoc_curve])
    vals = np.array([s for _, s in ship.sfoc_curve])
    out = np.interp(load, loads, vals)
    return float(out) if np.isscalar(load_fraction) else out


def fuel_rate(speed_kt, ship: ShipCharacteristics, chart: ResidualChart | None = None, strict: bool = False):
    """Fuel rate F = P_B * SFOC in MT/h at a given speed (kt)."""
    p_b = brake_power_kw(speed_kt, ship, chart)
    load = p_b / ship.max_power_kw
    psi = sfoc_at(ship, load, strict=strict)
    out = p_b * psi
    return float(out) if np.isscalar(speed_kt) else out


@dataclass(frozen=True)
class FuelCurvePoint:
    """One point of the speed / power / fuel-rate curve."""

    speed_kt: float
    brake_power_kw: float
    fuel_rate_mt_h: float


def fuel_curve(ship: ShipCharacteristics, speeds_kt, chart: ResidualChart | None = None) -> list[FuelCurvePoint]:
    chart = chart if chart is not None else load_residual_chart()
    points = []
    for v in np.asarray(speeds_kt, dtype=float):
        p_b = brake_power_kw(float(v), ship, chart)
        points.append(FuelCurvePoint(float(v), p_b, p_b * sfoc_at(ship, p_b / ship.max_power_kw)))
    return points


def fuel_objective(plan_kt, scenario: Scenario, chart: ResidualChart | None = None) -> float:
    """Total voyage fuel (MT): sum over legs of (d_i / v_i) * F(v_i).

    ``d_i / v_i`` is hours with distance in NM and speed in knots.
    """
    plan = np.asarray(plan_kt, dtype=float)
    if plan.shape != (scenario.n_legs,):
        raise FuelModelError(
            f"fuel_objective: plan length {plan.size} != n_legs {scenario.n_legs}"
        )
    if np.any(plan <= 0):
        raise FuelModelError("fuel_objective: all speeds must be positive")
    chart = chart if chart is not None else load_residual_chart()
    rates = fuel_rate(plan, scenario.ship, chart)
    hours = scenario.route.leg_length_nm / plan
    return float(np.sum(hours * rates))
