"""Command line entry point: ``windplan plan | bench | windgen``."""

from __future__ import annotations

import argparse
import json
import math
import sys

from windplan.bench import DEFAULT_RUNS, emit_report, load_scenario, run_benchmark
from windplan.energy import OBJECTIVES, write_trace
from windplan.planner import FRAMES, plan, reevaluate_energy, solution_trace
from windplan.windfields import FormatError, GriddedWindField, HorizontalShear, UpdraftRegion, Uniform, save_wind_grid

EXIT_OK = 0
EXIT_NO_SOLUTION = 1
EXIT_INVALID = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="windplan", description="Wind-aware fixed-wing path planning.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("plan", help="plan one path")
    p.add_argument("--scenario", required=True, help="scenario file or built-in name")
    p.add_argument("--objective", choices=OBJECTIVES, default="energy")
    p.add_argument("--frame", choices=FRAMES, default="ground")
    p.add_argument("--budget", type=float, default=None, help="planning time in seconds")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iterations", type=int, default=None)
    p.add_argument("--trace", default=None, help="write per-sample path data (comma separated)")

    b = sub.add_parser("bench", help="repeat planner runs and summarise")
    b.add_argument("--scenario", required=True)
    b.add_argument("--runs", type=int, default=DEFAULT_RUNS)
    b.add_argument("--seeds", default=None, help="comma separated seed list (default 0..runs-1)")
    b.add_argument("--budget", type=float, default=None)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--out", default=None, help="write per-run rows (comma separated)")

    w = sub.add_parser("windgen", help="rasterise a synthetic wind field to a grid file")
    w.add_argument("--kind", choices=("uniform", "shear", "updraft"), required=True)
    w.add_argument("--wind", type=float, nargs=3, default=(0.0, 0.0, 0.0), metavar=("WX", "WY", "WZ"))
    w.add_argument("--boundary", type=float, default=0.0)
    w.add_argument("--magnitude", type=float, default=5.0)
    w.add_argument("--axis", choices=("x", "y"), default="y")
    w.add_argument("--center", type=float, nargs=2, default=(0.0, 0.0), metavar=("X", "Y"))
    w.add_argument("--radius", type=float, default=300.0)
    w.add_argument("--strength", type=float, default=5.0)
    w.add_argument("--shape", type=int, nargs=3, default=(41, 41, 5), metavar=("NX", "NY", "NZ"))
    w.add_argument("--origin", type=float, nargs=3, default=(-1000.0, -1000.0, 0.0), metavar=("X0", "Y0", "Z0"))
    w.add_argument("--spacing", type=float, nargs=3, default=(50.0, 50.0, 100.0), metavar=("DX", "DY", "DZ"))
    w.add_argument("--out", required=True)
    return parser


def _cmd_plan(args) -> int:
    scenario = load_scenario(args.scenario)
    config = scenario.planner_config(args.objective, args.frame, args.seed, args.budget, max_iterations=args.max_iterations)
    result = plan(scenario.start, scenario.goal, scenario.wind, scenario.terrain, scenario.model, config)
    energy, flight_time = reevaluate_energy(result, scenario.wind, scenario.model, scenario.delta_l)
    record = {
        "scenario": scenario.name,
        "objective": args.objective,
        "frame": args.frame,
        "seed": args.seed,
        "graph_states": result.graph_states,
        "t_first_solution_s": result.t_first_solution,
        "planning_time_s": result.planning_time,
        "flight_time_s": flight_time,
        "energy_J": energy,
        "length_m": result.length,
        "success": bool(result.success and math.isfinite(energy)),
    }
    print(json.dumps(record))
    if args.trace is not None and result.success:
        write_trace(solution_trace(result, scenario.wind, scenario.model, scenario.delta_l), args.trace)
    return EXIT_OK if result.success else EXIT_NO_SOLUTION


def _cmd_bench(args) -> int:
    scenario = load_scenario(args.scenario)
    seeds = None
    if args.seeds is not None:
        try:
            seeds = [int(s) for s in args.seeds.split(",") if s.strip()]
        except ValueError:
            raise FormatError(f"--seeds: not a comma separated integer list: {args.seeds!r}") from None
    report = run_benchmark(scenario, args.runs, seeds, args.budget, args.jobs)
    if args.out is not None:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(emit_report(report, "delimited"))
    sys.stdout.write(emit_report(report, "table"))
    return EXIT_OK if any(r.success for r in report.rows) else EXIT_NO_SOLUTION


def _cmd_windgen(args) -> int:
    if args.kind == "uniform":
        field = Uniform(*args.wind)
    elif args.kind == "shear":
        field = HorizontalShear(args.boundary, args.magnitude, args.axis)
    else:
        field = UpdraftRegion(args.center[0], args.center[1], args.radius, args.strength)
    grid = GriddedWindField.from_field(field, args.shape, args.origin, args.spacing)
    save_wind_grid(grid, args.out)
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {"plan": _cmd_plan, "bench": _cmd_bench, "windgen": _cmd_windgen}[args.command]
    try:
        return handler(args)
    except (FormatError, ValueError, OSError) as exc:
        print(f"windplan: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
