"""Energy-, time- and distance-optimal fixed-wing path planning in known 3D wind fields."""

from windplan.airrel import AirRelativePath, connect_air_relative, cost_air_relative
from windplan.bench import BenchmarkReport, Scenario, emit_report, load_scenario, parse_report, run_benchmark
from windplan.dubins import DubinsAirplanePath, State, dubins_2d_shortest, dubins_airplane_connect, sample_path
from windplan.energy import CostReport, integrate_cost, power
from windplan.kinematics import VehicleModel, solve_wind_triangle
from windplan.planner import PlannerConfig, PlanResult, SearchTree, plan, steer, validate_path
from windplan.terrain import ElevationMap, elevation_at, load_elevation_map, motion_clear
from windplan.windfields import (
    FormatError,
    GriddedWindField,
    HorizontalShear,
    UpdraftRegion,
    Uniform,
    WindField,
    load_wind_grid,
    make_synthetic,
    sample_wind,
    save_wind_grid,
)

__all__ = [
    "AirRelativePath",
    "BenchmarkReport",
    "CostReport",
    "DubinsAirplanePath",
    "ElevationMap",
    "FormatError",
    "GriddedWindField",
    "HorizontalShear",
    "PlanResult",
    "PlannerConfig",
    "Scenario",
    "SearchTree",
    "State",
    "Uniform",
    "UpdraftRegion",
    "VehicleModel",
    "WindField",
    "connect_air_relative",
    "cost_air_relative",
    "dubins_2d_shortest",
    "dubins_airplane_connect",
    "elevation_at",
    "emit_report",
    "integrate_cost",
    "load_elevation_map",
    "load_scenario",
    "load_wind_grid",
    "make_synthetic",
    "motion_clear",
    "parse_report",
    "plan",
    "power",
    "run_benchmark",
    "sample_path",
    "sample_wind",
    "save_wind_grid",
    "solve_wind_triangle",
    "steer",
    "validate_path",
]
