"""Power model and the distance, time and energy cost objectives."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from windplan.dubins import DubinsAirplanePath
from windplan.kinematics import VehicleModel, solve_wind_triangle_batch
from windplan.windfields import WindField

OBJECTIVES = ("distance", "time", "energy")
DEFAULT_DELTA_L = 10.0

TRACE_COLUMNS = (
    "s",
    "x",
    "y",
    "z",
    "heading",
    "wx",
    "wy",
    "wz",
    "V_ground",
    "gamma_air_deg",
    "power_W",
    "cum_time_s",
    "cum_energy_J",
)


def thrust(gamma_air: float, model: VehicleModel) -> float:
    """Thrust for static longitudinal equilibrium; descents needing negative thrust clamp to 0."""
    return max(model.drag + model.mass * model.g * math.sin(gamma_air), 0.0)


def power(gamma_air: float, model: VehicleModel) -> float:
    return model.avionics_power + thrust(gamma_air, model) * model.airspeed / model.thrust_coefficient


def power_batch(gamma_air: np.ndarray, model: VehicleModel) -> np.ndarray:
    t = np.maximum(model.drag + model.mass * model.g * np.sin(gamma_air), 0.0)
    return model.avionics_power + t * model.airspeed / model.thrust_coefficient


@dataclass
class CostReport:
    value: float
    flight_time: float
    energy: float
    length: float
    feasible: bool
    objective: str = "energy"
    trace: list[dict] | None = field(default=None, repr=False)


def _check_objective(objective: str):
    if objective not in OBJECTIVES:
        raise ValueError(f"objective must be one of {OBJECTIVES}, got {objective!r}")


def integrate_cost(
    path: DubinsAirplanePath,
    field: WindField,
    model: VehicleModel,
    objective: str = "energy",
    delta_l: float = DEFAULT_DELTA_L,
    trace: bool = False,
) -> CostReport:
    """Euler-forward cost of flying ``path`` through ``field``.

    The path is cut into pieces of ``delta_l`` metres (the last may be
    shorter); wind and tangent are taken at the start of each piece. Time and
    energy objectives are infinite if any piece is outside the feasible wind
    set. The distance objective never touches the wind: its time and energy
    are the still-air values.
    """
    _check_objective(objective)
    if not delta_l > 0.0:
        raise ValueError("delta_l must be positive")
    total = path.length
    if objective == "distance" and not trace:
        t = total / model.airspeed
        e = power(path.gamma, model) * t
        return CostReport(total, t, e, total, True, objective)
    s, pos, head, tan, _ = path.sample_arrays(delta_l, include_end=False)
    return _integrate_samples(total, s, pos, head, tan, field, model, objective, trace)


def _integrate_samples(total, s, pos, head, tan, field, model, objective, trace=False):
    if len(s) == 0:
        report = CostReport(0.0, 0.0, 0.0, total, True, objective)
        if trace:
            report.trace = []
        return report
    steps = np.diff(np.append(s, total))
    winds = field.sample_many(pos)
    vg, gamma_air, ok = solve_wind_triangle_batch(tan, winds, model)
    feasible = bool(np.all(ok))
    if feasible:
        dt = steps / vg
        p = power_batch(gamma_air, model)
        time = float(np.sum(dt))
        energy = float(np.sum(p * dt))
    else:
        dt = np.where(ok, steps / np.where(ok, vg, 1.0), np.inf)
        p = np.where(ok, power_batch(np.nan_to_num(gamma_air), model), np.nan)
        time = energy = math.inf

    if objective == "distance":
        value = total
    elif not feasible:
        value = math.inf
    else:
        value = time if objective == "time" else energy

    report = CostReport(value, time, energy, total, feasible, objective)
    if trace:
        report.trace = _trace_rows(s, pos, head, winds, vg, gamma_air, p, dt, ok)
    return report


def _trace_rows(s, pos, head, winds, vg, gamma_air, p, dt, ok):
    rows = []
    cum_t = cum_e = 0.0
    for i in range(len(s)):
        rows.append(
            {
                "s": float(s[i]),
                "x": float(pos[i, 0]),
                "y": float(pos[i, 1]),
                "z": float(pos[i, 2]),
                "heading": float(head[i]),
                "wx": float(winds[i, 0]),
                "wy": float(winds[i, 1]),
                "wz": float(winds[i, 2]),
                "V_ground": float(vg[i]) if ok[i] else math.nan,
                "gamma_air_deg": math.degrees(gamma_air[i]) if ok[i] else math.nan,
                "power_W": float(p[i]) if ok[i] else math.nan,
                "cum_time_s": cum_t,
                "cum_energy_J": cum_e,
            }
        )
        cum_t += float(dt[i])
        cum_e += float(p[i] * dt[i]) if ok[i] else math.inf
    return rows


def path_trace(path, field, model, delta_l=DEFAULT_DELTA_L) -> list[dict]:
    """Per-sample rows plus a closing row at the path end carrying the totals."""
    report = integrate_cost(path, field, model, "energy", delta_l, trace=True)
    rows = list(report.trace)
    s, pos, head, tan, _ = path._eval(np.array([path.length]))
    wind = field.sample_many(pos)
    vg, ga, ok = solve_wind_triangle_batch(tan, wind, model)
    rows.append(
        {
            "s": float(s[0]),
            "x": float(pos[0, 0]),
            "y": float(pos[0, 1]),
            "z": float(pos[0, 2]),
            "heading": float(head[0]),
            "wx": float(wind[0, 0]),
            "wy": float(wind[0, 1]),
            "wz": float(wind[0, 2]),
            "V_ground": float(vg[0]) if ok[0] else math.nan,
            "gamma_air_deg": math.degrees(ga[0]) if ok[0] else math.nan,
            "power_W": float(power_batch(ga, model)[0]) if ok[0] else math.nan,
            "cum_time_s": report.flight_time,
            "cum_energy_J": report.energy,
        }
    )
    return rows


def write_trace(rows, out) -> str:
    """Write trace rows as comma-separated text; returns the text."""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=TRACE_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: repr(float(row[k])) for k in TRACE_COLUMNS})
    text = buf.getvalue()
    if out is not None:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
