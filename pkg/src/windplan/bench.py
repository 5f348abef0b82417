"""Scenarios, repeated planner runs and summary statistics."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from importlib import resources
from pathlib import Path

import numpy as np

from windplan.dubins import State
from windplan.kinematics import VehicleModel
from windplan.planner import FRAMES, PlannerConfig, plan, reevaluate_energy
from windplan.terrain import ElevationMap, load_elevation_map
from windplan.windfields import FormatError, WindField, make_synthetic
from windplan.energy import OBJECTIVES

BUILTIN_SCENARIOS = ("zero_wind", "shear_2", "shear_5", "shear_10", "shear_15", "updraft")
DEFAULT_RUNS = 10


@dataclass
class Scenario:
    name: str
    model: VehicleModel
    wind: WindField
    start: State
    goal: State
    bounds: tuple
    budget: float = 30.0
    configurations: tuple = (("energy", "ground"),)
    terrain: ElevationMap | None = None
    goal_bias: float = 0.05
    delta_l: float = 10.0
    clearance: float = 0.0
    rewire_factor: float = 1.0
    description: str = ""

    def planner_config(self, objective: str, frame: str, seed: int, budget: float | None = None, **overrides) -> PlannerConfig:
        return PlannerConfig(
            budget=self.budget if budget is None else budget,
            seed=seed,
            bounds=self.bounds,
            goal_bias=self.goal_bias,
            rewire_factor=self.rewire_factor,
            delta_l=self.delta_l,
            objective=objective,
            frame=frame,
            clearance=self.clearance,
            **overrides,
        )


def _state(doc, key, where) -> State:
    value = doc.get(key)
    if not isinstance(value, dict):
        raise FormatError(f"{where}: field {key!r} must be an object with x, y, z, heading_deg")
    try:
        return State(float(value["x"]), float(value["y"]), float(value["z"]), math.radians(float(value.get("heading_deg", 0.0))))
    except KeyError as exc:
        raise FormatError(f"{where}: field {key!r} is missing {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{where}: field {key!r}: {exc}") from None


def _configurations(doc, where):
    if "configurations" in doc:
        pairs = doc["configurations"]
        if not isinstance(pairs, list) or not pairs:
            raise FormatError(f"{where}: 'configurations' must be a non-empty list of [objective, frame] pairs")
    else:
        objectives = doc.get("objectives", list(OBJECTIVES))
        frames = doc.get("frames", ["ground"])
        if not isinstance(objectives, list) or not isinstance(frames, list):
            raise FormatError(f"{where}: 'objectives' and 'frames' must be lists")
        pairs = [[o, f] for o in objectives for f in frames]
    out = []
    for pair in pairs:
        if not (isinstance(pair, list) and len(pair) == 2):
            raise FormatError(f"{where}: configuration {pair!r} is not an [objective, frame] pair")
        objective, frame = pair
        if objective not in OBJECTIVES:
            raise FormatError(f"{where}: unknown objective {objective!r}")
        if frame not in FRAMES:
            raise FormatError(f"{where}: unknown frame {frame!r}")
        out.append((objective, frame))
    return tuple(out)


def scenario_from_dict(doc: dict, base_dir=None, where: str = "scenario") -> Scenario:
    if not isinstance(doc, dict):
        raise FormatError(f"{where}: top level must be an object")
    for key in ("name", "wind", "start", "goal", "bounds"):
        if key not in doc:
            raise FormatError(f"{where}: missing field {key!r}")
    try:
        model = VehicleModel.from_dict(doc.get("vehicle", {}))
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{where}: field 'vehicle': {exc}") from None
    wind = make_synthetic(doc["wind"], base_dir)
    bounds = doc["bounds"]
    if not (isinstance(bounds, list) and len(bounds) == 3 and all(isinstance(b, list) and len(b) == 2 for b in bounds)):
        raise FormatError(f"{where}: 'bounds' must be [[xmin, xmax], [ymin, ymax], [zmin, zmax]]")
    bounds = tuple((float(lo), float(hi)) for lo, hi in bounds)
    if any(not hi > lo for lo, hi in bounds):
        raise FormatError(f"{where}: 'bounds' must be non-degenerate")
    start, goal = _state(doc, "start", where), _state(doc, "goal", where)
    for key, s in (("start", start), ("goal", goal)):
        if not all(lo <= v <= hi for v, (lo, hi) in zip((s.x, s.y, s.z), bounds)):
            raise FormatError(f"{where}: {key} state lies outside 'bounds'")
    terrain = None
    ref = doc.get("terrain")
    if ref is not None:
        path = Path(ref)
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        if not path.exists():
            raise FormatError(f"{where}: terrain file {str(path)!r} not found")
        terrain = load_elevation_map(path, strict_bounds=bool(doc.get("strict_bounds", False)))
    try:
        scenario = Scenario(
            name=str(doc["name"]),
            model=model,
            wind=wind,
            start=start,
            goal=goal,
            bounds=bounds,
            budget=float(doc.get("budget", 30.0)),
            configurations=_configurations(doc, where),
            terrain=terrain,
            goal_bias=float(doc.get("goal_bias", 0.05)),
            delta_l=float(doc.get("delta_l", 10.0)),
            clearance=float(doc.get("clearance", 0.0)),
            rewire_factor=float(doc.get("rewire_factor", 1.0)),
            description=str(doc.get("description", "")),
        )
        # surface invalid planner settings at load time
        scenario.planner_config(*scenario.configurations[0], seed=0)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"{where}: {exc}") from None
    return scenario


def load_scenario(source) -> Scenario:
    """Load a scenario from a JSON file, JSON text, a ``dict``, or a built-in name."""
    if isinstance(source, dict):
        return scenario_from_dict(source)
    if isinstance(source, str) and source in BUILTIN_SCENARIOS:
        text = resources.files("windplan").joinpath("scenarios", f"{source}.json").read_text(encoding="utf-8")
        return scenario_from_dict(json.loads(text), where=f"scenario {source!r}")
    if isinstance(source, str) and source.lstrip().startswith("{"):
        try:
            return scenario_from_dict(json.loads(source))
        except json.JSONDecodeError as exc:
            raise FormatError(f"scenario: not valid JSON ({exc})") from None
    path = Path(source)
    where = f"scenario {str(path)!r}"
    if not path.exists():
        raise FormatError(f"{where}: file not found")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{where}: not valid JSON ({exc})") from None
    return scenario_from_dict(doc, base_dir=path.parent, where=where)


# --------------------------------------------------------------------------
# runs and statistics


@dataclass(frozen=True)
class RunRow:
    scenario: str
    objective: str
    frame: str
    seed: int
    graph_states: int
    t_first_solution_s: float
    planning_time_s: float
    flight_time_s: float
    energy_J: float
    length_m: float
    success: bool

    @property
    def label(self) -> str:
        return f"{self.objective[0]}_{self.frame[0]}"


ROW_COLUMNS = tuple(f.name for f in fields(RunRow))


@dataclass(frozen=True)
class Aggregate:
    label: str
    objective: str
    frame: str
    runs: int
    graph_states: tuple[float, float]
    t_first_solution_s: tuple[float, float]
    flight_time_s: tuple[float, float]
    energy_J: tuple[float, float]
    success_pct: float


def _mean_std(values) -> tuple[float, float]:
    if len(values) == 0:
        return math.inf, math.inf
    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        return math.inf, math.inf
    with np.errstate(over="ignore"):
        return float(np.mean(arr)), float(np.std(arr))


def aggregate(rows) -> list[Aggregate]:
    """Per-configuration statistics in order of first appearance.

    Graph states average over every run; time to first solution over runs
    that found one; flight time and energy over successful runs only, and
    ``inf`` when no run succeeded. Standard deviations are population values.
    """
    groups: dict[tuple[str, str], list[RunRow]] = {}
    for row in rows:
        groups.setdefault((row.objective, row.frame), []).append(row)
    out = []
    for (objective, frame), group in groups.items():
        ok = [r for r in group if r.success]
        found = [r.t_first_solution_s for r in group if math.isfinite(r.t_first_solution_s)]
        out.append(
            Aggregate(
                label=group[0].label,
                objective=objective,
                frame=frame,
                runs=len(group),
                graph_states=_mean_std([r.graph_states for r in group]),
                t_first_solution_s=_mean_std(found),
                flight_time_s=_mean_std([r.flight_time_s for r in ok]),
                energy_J=_mean_std([r.energy_J for r in ok]),
                success_pct=100.0 * len(ok) / len(group),
            )
        )
    return out


@dataclass
class BenchmarkReport:
    rows: list[RunRow] = field(default_factory=list)

    @property
    def aggregates(self) -> list[Aggregate]:
        return aggregate(self.rows)

    def __eq__(self, other):
        if not isinstance(other, BenchmarkReport) or len(self.rows) != len(other.rows):
            return False
        return all(_row_key(a) == _row_key(b) for a, b in zip(self.rows, other.rows))


def _row_key(row: RunRow):
    # nan-safe comparison of rows
    return tuple(repr(v) if isinstance(v, float) else v for v in asdict(row).values())


def run_once(scenario: Scenario, objective: str, frame: str, seed: int, budget: float | None = None, **overrides) -> RunRow:
    config = scenario.planner_config(objective, frame, seed, budget, **overrides)
    result = plan(scenario.start, scenario.goal, scenario.wind, scenario.terrain, scenario.model, config)
    energy, flight_time = reevaluate_energy(result, scenario.wind, scenario.model, scenario.delta_l)
    return RunRow(
        scenario=scenario.name,
        objective=objective,
        frame=frame,
        seed=int(seed),
        graph_states=result.graph_states,
        t_first_solution_s=result.t_first_solution,
        planning_time_s=result.planning_time,
        flight_time_s=flight_time,
        energy_J=energy,
        length_m=result.length,
        success=bool(result.success and math.isfinite(energy)),
    )


def _run_job(args):
    scenario, objective, frame, seed, budget = args
    return run_once(scenario, objective, frame, seed, budget)


def run_benchmark(
    scenario: Scenario,
    runs: int = DEFAULT_RUNS,
    seeds=None,
    budget: float | None = None,
    jobs: int = 1,
    progress=None,
) -> BenchmarkReport:
    """Run every configuration of ``scenario`` once per seed.

    ``seeds`` defaults to ``0 .. runs-1``; the same seed list is used for each
    configuration. With ``jobs > 1`` runs fan out to worker processes; rows
    are still reported in configuration-then-seed order.
    """
    if runs < 1:
        raise ValueError("runs must be at least 1")
    seeds = list(range(runs)) if seeds is None else [int(s) for s in seeds]
    if len(seeds) != runs:
        raise ValueError(f"expected {runs} seeds, got {len(seeds)}")
    if len(set(seeds)) != len(seeds):
        raise ValueError("seeds must be distinct")
    jobs_list = [(scenario, o, f, s, budget) for o, f in scenario.configurations for s in seeds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_job, jobs_list))
    else:
        rows = []
        for job in jobs_list:
            rows.append(_run_job(job))
            if progress is not None:
                progress(rows[-1])
    return BenchmarkReport(rows)


# --------------------------------------------------------------------------
# report documents


def _cell(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)  # 'inf' for infinity, round-trips exactly
    return str(value)


def _fmt_pm(pair, digits=1) -> str:
    mean, std = pair
    if not math.isfinite(mean):
        return "inf ± inf"
    return f"{mean:.{digits}f} ± {std:.{digits}f}"


def emit_report(report: BenchmarkReport, format: str = "table") -> str:
    """Render a report.

    ``delimited`` is comma-separated per-run rows under a fixed header (the
    summary is derived from them); ``table`` is the per-configuration summary
    with energies in joules.
    """
    if format == "delimited":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(ROW_COLUMNS)
        for row in report.rows:
            writer.writerow([_cell(getattr(row, c)) for c in ROW_COLUMNS])
        return buf.getvalue()
    if format != "table":
        raise ValueError(f"unknown report format {format!r}")
    aggs = report.aggregates
    header = ["metric"] + [a.label for a in aggs]
    lines = [
        ["graph_states"] + [_fmt_pm(a.graph_states, 0) for a in aggs],
        ["flight_time_s"] + [_fmt_pm(a.flight_time_s, 1) for a in aggs],
        ["energy_J"] + [_fmt_pm(a.energy_J, 0) for a in aggs],
        ["t_first_solution_s"] + [_fmt_pm(a.t_first_solution_s, 3) for a in aggs],
        ["success_pct"] + [f"{a.success_pct:.0f}" for a in aggs],
    ]
    table = [header] + lines
    widths = [max(len(r[i]) for r in table) for i in range(len(header))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in table) + "\n"


def _parse_value(column: str, text: str):
    kind = {f.name: f.type for f in fields(RunRow)}[column]
    if kind == "bool":
        if text not in ("0", "1"):
            raise FormatError(f"column {column!r}: expected 0 or 1, got {text!r}")
        return text == "1"
    if kind == "int":
        return int(text)
    if kind == "float":
        return float(text)
    return text


def parse_report(document: str) -> BenchmarkReport:
    """Inverse of ``emit_report(..., "delimited")``."""
    reader = csv.reader(io.StringIO(document))
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError("report: empty document") from None
    if tuple(header) != ROW_COLUMNS:
        raise FormatError(f"report: unexpected header {header!r}")
    rows = []
    for lineno, cells in enumerate(reader, start=2):
        if not cells:
            continue
        if len(cells) != len(ROW_COLUMNS):
            raise FormatError(f"report line {lineno}: expected {len(ROW_COLUMNS)} cells, got {len(cells)}")
        try:
            values = {c: _parse_value(c, t) for c, t in zip(ROW_COLUMNS, cells)}
        except ValueError as exc:
            raise FormatError(f"report line {lineno}: {exc}") from None
        rows.append(RunRow(**values))
    return BenchmarkReport(rows)
