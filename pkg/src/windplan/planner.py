"""Anytime RRT* over the Dubins airplane state space with wind-aware edge costs."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from windplan.airrel import AirRelativePath, connect_air_relative, cost_air_relative
from windplan.dubins import DubinsAirplanePath, State, dubins_airplane_connect, sample_path, wrap_pi
from windplan.energy import DEFAULT_DELTA_L, OBJECTIVES, _integrate_samples, power
from windplan.kinematics import VehicleModel, solve_wind_triangle
from windplan.terrain import ElevationMap, elevation_at, positions_clear
from windplan.windfields import WindField

FRAMES = ("ground", "air")

# Calibration of the shrinking-ball constant: the ball should hold about this
# share of the tree at the reference size, i.e. ~10 neighbours at n = 500.
_REF_NODES = 500
_REF_NEIGHBOURS = 10
_CALIBRATION_SEED = 20240229
_CALIBRATION_PAIRS = 20000


@dataclass(frozen=True)
class PlannerConfig:
    """Planner settings. ``bounds`` is ``((xmin, xmax), (ymin, ymax), (zmin, zmax))``.

    ``max_goal_distance=None`` means twice the sampling-box diagonal, so a
    goal connection is attempted from every new node. ``max_iterations`` and
    ``stop_on_cost`` end the search early; with a generous ``budget`` and a
    fixed ``max_iterations`` a run is reproducible bit for bit.
    """

    budget: float = 30.0
    seed: int = 0
    bounds: tuple = ((-1000.0, 1000.0), (-1000.0, 1000.0), (0.0, 500.0))
    goal_bias: float = 0.05
    rewire_factor: float = 1.0
    delta_l: float = DEFAULT_DELTA_L
    objective: str = "energy"
    frame: str = "ground"
    max_goal_distance: float | None = None
    clearance: float = 0.0
    max_iterations: int | None = None
    stop_on_cost: float | None = None
    eps_goal: float = 1.0
    air_max_iter: int = 50

    def __post_init__(self):
        if not self.budget > 0.0:
            raise ValueError("budget must be positive")
        if not 0.0 <= self.goal_bias < 1.0:
            raise ValueError("goal_bias must lie in [0, 1)")
        if len(self.bounds) != 3 or any(len(b) != 2 or not b[1] > b[0] for b in self.bounds):
            raise ValueError("bounds must be three non-degenerate (min, max) pairs")
        if not self.rewire_factor > 0.0:
            raise ValueError("rewire_factor must be positive")
        if not self.delta_l > 0.0:
            raise ValueError("delta_l must be positive")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}")
        if self.frame not in FRAMES:
            raise ValueError(f"frame must be one of {FRAMES}")
        if self.clearance < 0.0:
            raise ValueError("clearance must be non-negative")
        if self.max_iterations is not None and self.max_iterations < 0:
            raise ValueError("max_iterations must be non-negative")

    @property
    def diagonal(self) -> float:
        return math.sqrt(sum((hi - lo) ** 2 for lo, hi in self.bounds))

    def inside(self, state: State) -> bool:
        return all(lo <= v <= hi for v, (lo, hi) in zip((state.x, state.y, state.z), self.bounds))


# --------------------------------------------------------------------------
# edges


@dataclass
class Edge:
    """A tree motion: the geometric path (ground or air frame) and its cost."""

    path: DubinsAirplanePath
    cost: float
    flight_time: float
    energy: float
    air: AirRelativePath | None = None


def steer(a: State, b: State, model: VehicleModel) -> DubinsAirplanePath:
    """Exact ground-relative connection between two states."""
    return dubins_airplane_connect(a, b, model)


class _EdgeEvaluator:
    """Builds edges and checks them against terrain and wind in one pass."""

    def __init__(self, field_: WindField, emap: ElevationMap | None, model: VehicleModel, config: PlannerConfig):
        self.field = field_
        self.emap = emap
        self.model = model
        self.config = config
        self.latencies: list[float] = []

    def __call__(self, a: State, b: State) -> Edge | None:
        t0 = time.perf_counter()
        try:
            if self.config.frame == "air":
                return self._air(a, b)
            return self._ground(a, b)
        finally:
            self.latencies.append(time.perf_counter() - t0)

    def _ground(self, a, b):
        cfg = self.config
        path = steer(a, b, self.model)
        total = path.length
        if cfg.objective == "distance" and self.emap is None:
            t = total / self.model.airspeed
            return Edge(path, total, t, power(path.gamma, self.model) * t)
        s, pos, head, tan, _ = path.sample_arrays(cfg.delta_l, include_end=True)
        if not positions_clear(self.emap, pos, cfg.clearance):
            return None
        if cfg.objective == "distance":
            t = total / self.model.airspeed
            return Edge(path, total, t, power(path.gamma, self.model) * t)
        rep = _integrate_samples(total, s[:-1], pos[:-1], head[:-1], tan[:-1], self.field, self.model, cfg.objective)
        if not rep.feasible:
            return None
        return Edge(path, rep.value, rep.flight_time, rep.energy)

    def _air(self, a, b):
        cfg = self.config
        apath = connect_air_relative(a, b, self.field, self.model, cfg.eps_goal, cfg.air_max_iter, cfg.delta_l)
        if not apath.converged:
            return None
        if not positions_clear(self.emap, apath.ground_track, cfg.clearance):
            return None
        rep = cost_air_relative(apath, self.model, cfg.objective)
        return Edge(apath.path, rep.value, rep.flight_time, rep.energy, apath)


# --------------------------------------------------------------------------
# tree


class SearchTree:
    """Nodes with cost-to-come and parent pointers; node 0 is the root."""

    def __init__(self, root: State, capacity: int = 1024):
        self.states: list[State] = []
        self.parent: list[int] = []
        self.cost: list[float] = []
        self.edges: list[Edge | None] = []
        self.children: list[list[int]] = []
        self._xyz = np.empty((capacity, 3))
        self._heading = np.empty(capacity)
        self.add(root, -1, None, 0.0)

    def __len__(self) -> int:
        return len(self.states)

    def add(self, state: State, parent: int, edge: Edge | None, cost: float) -> int:
        i = len(self.states)
        if i == len(self._heading):
            self._xyz = np.concatenate([self._xyz, np.empty_like(self._xyz)])
            self._heading = np.concatenate([self._heading, np.empty_like(self._heading)])
        self._xyz[i] = (state.x, state.y, state.z)
        self._heading[i] = state.heading
        self.states.append(state)
        self.parent.append(parent)
        self.cost.append(cost)
        self.edges.append(edge)
        self.children.append([])
        if parent >= 0:
            self.children[parent].append(i)
        return i

    def proxy_distances(self, state: State, turn_radius: float) -> np.ndarray:
        n = len(self.states)
        d = np.linalg.norm(self._xyz[:n] - (state.x, state.y, state.z), axis=1)
        dh = np.abs((self._heading[:n] - state.heading + math.pi) % (2 * math.pi) - math.pi)
        return d + turn_radius * dh

    def is_ancestor(self, a: int, b: int) -> bool:
        """True if ``a`` lies on the path from the root to ``b``."""
        while b >= 0:
            if b == a:
                return True
            b = self.parent[b]
        return False

    def reparent(self, node: int, parent: int, edge: Edge):
        self.children[self.parent[node]].remove(node)
        self.parent[node] = parent
        self.edges[node] = edge
        self.children[parent].append(node)
        stack = [node]
        while stack:
            k = stack.pop()
            self.cost[k] = self.cost[self.parent[k]] + self.edges[k].cost
            stack.extend(self.children[k])

    def branch(self, node: int) -> list[int]:
        out = []
        while node >= 0:
            out.append(node)
            node = self.parent[node]
        return out[::-1]


def proxy_distance(a: State, b: State, turn_radius: float) -> float:
    """Cheap stand-in for the Dubins distance used for nearest and near queries."""
    return float(np.linalg.norm(a.position - b.position)) + turn_radius * abs(wrap_pi(a.heading - b.heading))


def calibrated_gamma(config: PlannerConfig, turn_radius: float) -> float:
    """Shrinking-ball constant so the ball holds ~10 random states at n = 500."""
    rng = np.random.default_rng(_CALIBRATION_SEED)
    lo = np.array([b[0] for b in config.bounds])
    hi = np.array([b[1] for b in config.bounds])
    p = rng.uniform(lo, hi, size=(_CALIBRATION_PAIRS, 3))
    q = rng.uniform(lo, hi, size=(_CALIBRATION_PAIRS, 3))
    dh = np.abs(rng.uniform(-math.pi, math.pi, _CALIBRATION_PAIRS))
    d = np.linalg.norm(p - q, axis=1) + turn_radius * dh
    radius = float(np.quantile(d, _REF_NEIGHBOURS / _REF_NODES))
    return radius / (math.log(_REF_NODES) / _REF_NODES) ** 0.25


# --------------------------------------------------------------------------
# planning


@dataclass
class PlanResult:
    success: bool
    path: list[Edge]
    states: list[State]
    cost: float
    flight_time: float
    energy: float
    length: float
    graph_states: int
    iterations: int
    t_first_solution: float
    planning_time: float
    cost_trace: list[tuple[float, int, float]]
    latencies: list[float] = field(default_factory=list, repr=False)
    objective: str = "energy"
    frame: str = "ground"
    seed: int = 0
    tree: SearchTree | None = field(default=None, repr=False)

    @property
    def segments(self):
        return [seg for e in self.path for seg in e.path.segments]


def _sample(rng, config: PlannerConfig, goal: State) -> State:
    if rng.random() < config.goal_bias:
        return goal
    (x0, x1), (y0, y1), (z0, z1) = config.bounds
    x, y, z, h = rng.uniform((x0, y0, z0, 0.0), (x1, y1, z1, 2 * math.pi))
    return State(float(x), float(y), float(z), float(h))


def plan(
    start: State,
    goal: State,
    field_: WindField,
    emap: ElevationMap | None,
    model: VehicleModel,
    config: PlannerConfig,
) -> PlanResult:
    """Anytime RRT*: keep improving the best start-to-goal path until the budget runs out.

    Edge costs are the configured objective; any motion that leaves the
    feasible wind set (time and energy objectives) or touches terrain is
    discarded. A failed search returns ``success=False`` with its metrics.
    """
    t0 = time.perf_counter()
    rng = np.random.default_rng(config.seed)
    radius_turn = model.turn_radius
    evaluate = _EdgeEvaluator(field_, emap, model, config)
    gamma = config.rewire_factor * calibrated_gamma(config, radius_turn)
    max_goal = config.max_goal_distance if config.max_goal_distance is not None else 2.0 * config.diagonal

    tree = SearchTree(start)
    goal_links: list[tuple[int, Edge]] = []
    trace: list[tuple[float, int, float]] = []
    best_cost = math.inf
    best_link = -1
    t_first = math.inf

    def state_ok(s: State) -> bool:
        return config.inside(s) and s.z >= elevation_at(emap, s.x, s.y) + config.clearance

    def try_goal(node: int):
        if proxy_distance(tree.states[node], goal, radius_turn) > max_goal:
            return
        edge = evaluate(tree.states[node], goal)
        if edge is not None and math.isfinite(edge.cost):
            goal_links.append((node, edge))

    def refresh(it: int):
        # rewiring only lowers node costs and links are never removed, so a
        # running minimum is non-increasing
        nonlocal best_cost, best_link, t_first
        for k, (node, edge) in enumerate(goal_links):
            c = tree.cost[node] + edge.cost
            if c < best_cost:
                best_cost, best_link = c, k
        if best_link >= 0 and (not trace or best_cost < trace[-1][2]):
            now = time.perf_counter() - t0
            if not math.isfinite(t_first):
                t_first = now
            trace.append((now, it, best_cost))

    goal_ok = state_ok(goal)
    it = 0
    if state_ok(start) and goal_ok:
        try_goal(0)
        refresh(0)

    def stop() -> bool:
        if time.perf_counter() - t0 >= config.budget:
            return True
        if config.max_iterations is not None and it >= config.max_iterations:
            return True
        return config.stop_on_cost is not None and best_cost <= config.stop_on_cost

    while goal_ok and state_ok(start) and not stop():
        it += 1
        target = _sample(rng, config, goal)
        if not state_ok(target):
            continue
        n = len(tree)
        dist = tree.proxy_distances(target, radius_turn)
        r = gamma * (math.log(n + 1) / (n + 1)) ** 0.25
        near = np.flatnonzero(dist <= r)
        if near.size == 0:
            near = np.array([int(np.argmin(dist))])
        # cheapest candidates first
        near = sorted((int(i) for i in near), key=lambda i: (tree.cost[i], i))

        parent, parent_edge, new_cost = -1, None, math.inf
        for i in near:
            if tree.cost[i] >= new_cost:
                break
            edge = evaluate(tree.states[i], target)
            if edge is None:
                continue
            c = tree.cost[i] + edge.cost
            if c < new_cost:
                parent, parent_edge, new_cost = i, edge, c
        if parent < 0:
            continue
        new = tree.add(target, parent, parent_edge, new_cost)

        for j in near:
            if j == parent or tree.is_ancestor(j, new):
                continue
            edge = evaluate(target, tree.states[j])
            if edge is None:
                continue
            if new_cost + edge.cost < tree.cost[j] - 1e-9 * max(1.0, abs(tree.cost[j])):
                tree.reparent(j, new, edge)
        try_goal(new)
        refresh(it)

    elapsed = time.perf_counter() - t0
    base = dict(
        graph_states=len(tree),
        iterations=it,
        t_first_solution=t_first,
        planning_time=elapsed,
        cost_trace=trace,
        latencies=evaluate.latencies,
        objective=config.objective,
        frame=config.frame,
        seed=config.seed,
        tree=tree,
    )
    if best_link < 0:
        return PlanResult(False, [], [], math.inf, math.inf, math.inf, math.inf, **base)
    node, goal_edge = goal_links[best_link]
    chain = tree.branch(node)
    edges = [tree.edges[k] for k in chain[1:]] + [goal_edge]
    states = [tree.states[k] for k in chain] + [goal]
    return PlanResult(
        True,
        edges,
        states,
        best_cost,
        sum(e.flight_time for e in edges),
        sum(e.energy for e in edges),
        sum(e.path.length for e in edges),
        **base,
    )


# --------------------------------------------------------------------------
# post-hoc validation


@dataclass
class Validation:
    feasible: bool
    cost: float
    flight_time: float
    energy: float


def validate_path(
    edges,
    field_: WindField,
    emap: ElevationMap | None,
    model: VehicleModel,
    objective: str = "energy",
    delta_l: float = DEFAULT_DELTA_L,
    clearance: float = 0.0,
) -> Validation:
    """Re-check a returned solution with a plain per-sample loop.

    Ground edges are re-integrated point by point; air edges have their
    ground track re-simulated from scratch. Shares no code with the planner's
    vectorised edge evaluation beyond path geometry and the wind triangle.
    """
    total_t = total_e = total_len = 0.0
    ok = True
    for edge in edges:
        if edge.air is not None:
            ap = edge.air
            again = connect_air_relative(ap.start, ap.goal, field_, model, max_iter=max(ap.iterations, 1), delta_l=delta_l)
            for x, y, z in again.ground_track:
                if z < elevation_at(emap, x, y) + clearance:
                    ok = False
            if not again.converged:
                ok = False
            for seg in again.path.segments:
                dt = seg.length_3d / model.airspeed
                total_t += dt
                total_e += power(seg.gamma, model) * dt
            total_len += again.path.length
            continue
        path = edge.path
        length = path.length
        total_len += length
        for smp in sample_path(path, delta_l):
            x, y, z = smp.state.x, smp.state.y, smp.state.z
            if z < elevation_at(emap, x, y) + clearance:
                ok = False
        if objective == "distance":
            t = length / model.airspeed
            total_t += t
            total_e += power(path.gamma, model) * t
            continue
        s = 0.0
        while s < length - 1e-9 * max(1.0, length):
            step = min(delta_l, length - s)
            _, pos, _, tan, _ = path._eval(np.array([s]))
            sol = solve_wind_triangle(tan[0], field_.sample(pos[0]), model)
            if not sol.feasible:
                ok = False
                break
            dt = step / sol.ground_speed
            total_t += dt
            total_e += power(sol.gamma_air, model) * dt
            s += delta_l
    if not ok:
        return Validation(False, math.inf, math.inf, math.inf)
    value = {"distance": total_len, "time": total_t, "energy": total_e}[objective]
    return Validation(True, value, total_t, total_e)


def reevaluate_energy(result: PlanResult, field_: WindField, model: VehicleModel, delta_l: float = DEFAULT_DELTA_L):
    """Energy and time of a returned path under the wind, whatever objective planned it."""
    if not result.success:
        return math.inf, math.inf
    if result.frame == "air" or result.objective != "distance":
        return result.energy, result.flight_time
    from windplan.energy import integrate_cost

    energy = time_ = 0.0
    for edge in result.path:
        rep = integrate_cost(edge.path, field_, model, "energy", delta_l)
        energy += rep.energy
        time_ += rep.flight_time
    return energy, time_


def with_seed(config: PlannerConfig, seed: int) -> PlannerConfig:
    return replace(config, seed=seed)


def solution_trace(result: PlanResult, field_: WindField, model: VehicleModel, delta_l: float = DEFAULT_DELTA_L) -> list[dict]:
    """Plot-ready rows along a returned solution, with ``s`` and totals running over all edges.

    Air edges report their simulated ground track; their heading column is
    the air-relative heading and power is the constant segment power.
    """
    from windplan.energy import path_trace

    rows: list[dict] = []
    s0 = t0 = e0 = 0.0
    for edge in result.path:
        if edge.air is None:
            part = path_trace(edge.path, field_, model, delta_l)
        else:
            part = _air_rows(edge, field_, model, delta_l)
        for row in part[:-1] if edge is not result.path[-1] else part:
            row = dict(row)
            row["s"] += s0
            row["cum_time_s"] += t0
            row["cum_energy_J"] += e0
            rows.append(row)
        s0 += part[-1]["s"]
        t0 += part[-1]["cum_time_s"]
        e0 += part[-1]["cum_energy_J"]
    return rows


def _air_rows(edge: Edge, field_, model, delta_l):
    path = edge.path
    s, _, head, tan, _ = path.sample_arrays(delta_l, include_end=True)
    track = edge.air.ground_track
    winds = field_.sample_many(track)
    p = power(path.gamma, model)
    rows = []
    for k in range(len(s)):
        vg = model.airspeed * tan[k] + winds[k]
        t = s[k] / model.airspeed
        rows.append(
            {
                "s": float(s[k]),
                "x": float(track[k, 0]),
                "y": float(track[k, 1]),
                "z": float(track[k, 2]),
                "heading": float(head[k]),
                "wx": float(winds[k, 0]),
                "wy": float(winds[k, 1]),
                "wz": float(winds[k, 2]),
                "V_ground": float(np.linalg.norm(vg)),
                "gamma_air_deg": math.degrees(path.gamma),
                "power_W": p,
                "cum_time_s": t,
                "cum_energy_J": p * t,
            }
        )
    return rows
