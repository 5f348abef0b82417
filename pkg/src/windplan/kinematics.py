"""Vehicle parameters and wind-triangle resolution along a ground-relative path."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

G0 = 9.80665


@dataclass(frozen=True)
class VehicleModel:
    """Kinematic and energetic parameters of a fixed-wing vehicle.

    Defaults describe a small (5 kg) hand-launched airframe flying at 15 m/s.
    Angles are in radians.
    """

    mass: float = 5.0
    kappa_max: float = 0.02
    thrust_coefficient: float = 0.3
    airspeed: float = 15.0
    gamma_ground_max: float = math.radians(10.0)
    gamma_air_max: float = math.radians(20.0)
    drag: float = 5.0
    avionics_power: float = 60.0
    g: float = G0

    def __post_init__(self):
        for name in (
            "mass",
            "kappa_max",
            "thrust_coefficient",
            "airspeed",
            "gamma_ground_max",
            "gamma_air_max",
            "drag",
            "avionics_power",
            "g",
        ):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"VehicleModel.{name} must be finite and positive, got {value!r}")
        if self.gamma_air_max > math.pi / 2:
            raise ValueError("gamma_air_max must not exceed 90 degrees")
        # a full tailwind doubles the ground-relative climb angle seen in the air frame
        if 2.0 * self.gamma_ground_max > self.gamma_air_max + 1e-12:
            raise ValueError(
                "gamma_ground_max must be at most half of gamma_air_max "
                f"({math.degrees(self.gamma_ground_max):.3f} deg vs {math.degrees(self.gamma_air_max):.3f} deg)"
            )

    @property
    def turn_radius(self) -> float:
        return 1.0 / self.kappa_max

    @classmethod
    def from_dict(cls, data: dict) -> VehicleModel:
        """Build a model from a mapping; ``*_deg`` keys are accepted for the angle limits."""
        kwargs = {}
        for key, value in data.items():
            if key in ("gamma_ground_max_deg", "gamma_air_max_deg"):
                kwargs[key[:-4]] = math.radians(float(value))
            elif key in cls.__dataclass_fields__:
                kwargs[key] = float(value)
            else:
                raise ValueError(f"unknown vehicle parameter {key!r}")
        return cls(**kwargs)

    def to_dict(self) -> dict:
        return {
            "mass": self.mass,
            "kappa_max": self.kappa_max,
            "thrust_coefficient": self.thrust_coefficient,
            "airspeed": self.airspeed,
            "gamma_ground_max_deg": math.degrees(self.gamma_ground_max),
            "gamma_air_max_deg": math.degrees(self.gamma_air_max),
            "drag": self.drag,
            "avionics_power": self.avionics_power,
            "g": self.g,
        }


@dataclass(frozen=True)
class WindTriangleSolution:
    ground_speed: float
    airspeed_parallel: float
    wind_perpendicular: float
    wind_parallel: float
    gamma_air: float
    feasible: bool


def solve_wind_triangle(tangent, wind, model: VehicleModel) -> WindTriangleSolution:
    """Resolve the wind triangle for flight along the unit direction ``tangent``.

    The air-relative velocity is chosen so that the ground velocity points
    along ``tangent``: its normal component cancels the perpendicular wind and
    the tangential part takes the larger root. The solution is infeasible if
    no positive ground speed exists or the resulting air-relative flight path
    angle leaves ``[-gamma_air_max, gamma_air_max]``.
    """
    ux, uy, uz = (float(c) for c in tangent)
    norm = math.sqrt(ux * ux + uy * uy + uz * uz)
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"path tangent must be a unit vector, got norm {norm!r}")
    wx, wy, wz = (float(c) for c in wind)
    va = model.airspeed

    w_par = wx * ux + wy * uy + wz * uz
    px, py, pz = wx - w_par * ux, wy - w_par * uy, wz - w_par * uz
    w_perp = math.sqrt(px * px + py * py + pz * pz)
    if w_perp >= va:
        return WindTriangleSolution(0.0, 0.0, w_perp, w_par, math.nan, False)
    va_par = math.sqrt(va * va - w_perp * w_perp)
    vg = va_par + w_par
    # With an upwind component the sum above cancels; the sign of the ground
    # speed is then decided exactly by |W| < V (the two roots multiply to
    # |W|^2 - V^2).
    if vg <= 0.0 or (w_par < 0.0 and wx * wx + wy * wy + wz * wz >= va * va):
        return WindTriangleSolution(vg, va_par, w_perp, w_par, math.nan, False)
    sin_gamma_air = (vg * uz - wz) / va
    gamma_air = math.asin(min(1.0, max(-1.0, sin_gamma_air)))
    feasible = abs(gamma_air) <= model.gamma_air_max
    return WindTriangleSolution(vg, va_par, w_perp, w_par, gamma_air, feasible)


def solve_wind_triangle_batch(tangents: np.ndarray, winds: np.ndarray, model: VehicleModel):
    """Vectorised :func:`solve_wind_triangle` over rows of ``(N, 3)`` arrays.

    Returns ``(ground_speed, gamma_air, feasible)``; entries of infeasible rows
    carry ``nan`` for ``gamma_air``.
    """
    va = model.airspeed
    w_par = np.einsum("ij,ij->i", winds, tangents)
    perp = winds - w_par[:, None] * tangents
    w_perp = np.sqrt(np.einsum("ij,ij->i", perp, perp))
    ok = w_perp < va
    va_par = np.sqrt(np.where(ok, va * va - w_perp * w_perp, 0.0))
    vg = va_par + w_par
    ok &= vg > 0.0
    ok &= (w_par >= 0.0) | (np.einsum("ij,ij->i", winds, winds) < va * va)
    sin_ga = (vg * tangents[:, 2] - winds[:, 2]) / va
    gamma_air = np.where(ok, np.arcsin(np.clip(sin_ga, -1.0, 1.0)), np.nan)
    ok &= np.abs(np.where(ok, gamma_air, 0.0)) <= model.gamma_air_max
    return vg, gamma_air, ok


def level_tangent(heading: float, gamma: float = 0.0) -> tuple[float, float, float]:
    c = math.cos(gamma)
    return (c * math.cos(heading), c * math.sin(heading), math.sin(gamma))


def feasible_state(state, wind, model: VehicleModel, gamma: float = 0.0) -> bool:
    """True iff flight from ``state`` along its heading at ``gamma`` is inside the feasible wind set."""
    return solve_wind_triangle(level_tangent(state.heading, gamma), wind, model).feasible
