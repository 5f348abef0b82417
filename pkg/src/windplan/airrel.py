"""Air-relative Dubins airplane paths in non-uniform wind.

An air-relative path is a Dubins airplane path drawn in the moving air mass:
the vehicle flies it at constant airspeed while the wind carries it, so the
ground track is the air path plus the accumulated drift

    p_ground(t) = p_air(V * t) + integral of W(p_ground) dt.

There is no closed form for the air path that lands on a given ground goal.
We iterate on a virtual goal instead: plan to the virtual goal, simulate the
drift, move the virtual goal by the remaining ground error, repeat.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from windplan.dubins import DubinsAirplanePath, State, dubins_airplane_connect
from windplan.energy import DEFAULT_DELTA_L, CostReport, _check_objective, power
from windplan.kinematics import VehicleModel
from windplan.windfields import WindField

_MAX_SWEEPS = 12


@dataclass
class AirRelativePath:
    """Result of the virtual-goal iteration.

    ``path`` lives in the air frame and starts at the start position; its
    headings are air-relative headings and ``path.gamma`` is the constant
    air-relative flight path angle. ``ground_track`` holds the simulated
    ground positions at each integration sample plus the endpoint.
    """

    path: DubinsAirplanePath
    start: State
    goal: State
    virtual_goal: State
    ground_track: np.ndarray = field(repr=False)
    drift: np.ndarray
    errors: list[float]
    converged: bool
    iterations: int

    @property
    def air_length(self) -> float:
        return self.path.length

    @property
    def endpoint_error(self) -> float:
        return self.errors[-1] if self.errors else math.inf

    @property
    def heading_air(self) -> list[float]:
        return [seg.start.heading for seg in self.path.segments]

    @property
    def gamma_air(self) -> float:
        return self.path.gamma


def simulate_drift(path: DubinsAirplanePath, wind: WindField, model: VehicleModel, delta_l: float = DEFAULT_DELTA_L):
    """Advect an air path through ``wind`` with Euler-forward steps of ``delta_l`` air metres.

    Returns ``(ground_track, drift)``: ground positions at each step start plus
    the endpoint, and the total drift vector.
    """
    s, pos, _, _, _ = path.sample_arrays(delta_l, include_end=True)
    scale = (np.diff(s) / model.airspeed)[:, None]
    n = len(s)
    # Sweep the recursion d[k+1] = d[k] + W(p[k] + d[k]) * dt[k] in whole-array
    # passes. Every pass fixes at least the first wrong entry, and a pass that
    # changes nothing is bit-identical to the sequential recursion because the
    # running sum adds in the same order.
    drift = np.zeros((n, 3))
    fixed = 0
    for _ in range(_MAX_SWEEPS):
        w = wind.sample_many(pos[:-1] + drift[:-1])
        new = np.zeros((n, 3))
        np.cumsum(w * scale, axis=0, out=new[1:])
        diff = np.flatnonzero(np.any(new != drift, axis=1))
        drift = new
        if diff.size == 0:
            return pos + drift, drift[-1].copy()
        fixed = int(diff[0])
    for k in range(fixed, n - 1):
        w = wind.sample_many(pos[k : k + 1] + drift[k : k + 1])[0]
        drift[k + 1] = drift[k] + w * scale[k, 0]
    return pos + drift, drift[-1].copy()


def connect_air_relative(
    start: State,
    goal: State,
    wind: WindField,
    model: VehicleModel,
    eps_goal: float = 1.0,
    max_iter: int = 50,
    delta_l: float = DEFAULT_DELTA_L,
    damping: float = 1.0,
) -> AirRelativePath:
    """Find an air-relative path whose advected ground track ends at ``goal``.

    Start and goal headings are taken as air-relative headings. The air path
    uses the same curvature and climb limits as ground-relative paths, so in
    calm air both coincide. The iteration stops on convergence
    (endpoint error < ``eps_goal``), after ``max_iter`` iterations, or once
    the error has grown three times in a row.
    """
    if not eps_goal > 0.0:
        raise ValueError("eps_goal must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    target = goal.position
    virtual = goal
    errors: list[float] = []
    growth = 0
    path = track = drift = None
    for it in range(1, max_iter + 1):
        path = dubins_airplane_connect(start, virtual, model)
        track, drift = simulate_drift(path, wind, model, delta_l)
        miss = target - track[-1]
        err = float(np.linalg.norm(miss))
        if not math.isfinite(err):
            break
        if errors and err > errors[-1]:
            growth += 1
        else:
            growth = 0
        errors.append(err)
        if err < eps_goal:
            return AirRelativePath(path, start, goal, virtual, track, drift, errors, True, it)
        if growth >= 3:
            break
        v = virtual.position + damping * miss
        virtual = State(float(v[0]), float(v[1]), float(v[2]), goal.heading)
    return AirRelativePath(path, start, goal, virtual, track, drift, errors, False, len(errors))


def cost_air_relative(apath: AirRelativePath, model: VehicleModel, objective: str = "energy") -> CostReport:
    """Cost with constant air-relative variables: no wind integration along the path.

    Each segment is flown at the airspeed with its own air-relative flight
    path angle, so its time is air length over airspeed. The distance
    objective is the air-frame length. Non-converged paths cost ``inf``.
    """
    _check_objective(objective)
    length = apath.path.length
    if not apath.converged:
        return CostReport(math.inf, math.inf, math.inf, length, False, objective)
    time = energy = 0.0
    for seg in apath.path.segments:
        dt = seg.length_3d / model.airspeed
        time += dt
        energy += power(seg.gamma, model) * dt
    value = {"distance": length, "time": time, "energy": energy}[objective]
    return CostReport(value, time, energy, length, True, objective)
