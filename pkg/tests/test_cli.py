import json

import pytest

from windplan.cli import main
from windplan.energy import TRACE_COLUMNS
from windplan.windfields import load_wind_grid


def tiny(tmp_path, **kw):
    doc = {
        "name": "tiny",
        "wind": {"kind": "uniform", "wind": [2, 0, 0]},
        "start": {"x": 0, "y": 0, "z": 100, "heading_deg": 0},
        "goal": {"x": 1000, "y": 0, "z": 100, "heading_deg": 0},
        "bounds": [[-200, 1200], [-500, 500], [50, 200]],
        "budget": 0.3,
        "configurations": [["time", "ground"]],
    }
    doc.update(kw)
    path = tmp_path / "s.json"
    path.write_text(json.dumps(doc))
    return str(path)


def test_plan_with_trace(tmp_path, capsys):
    out = tmp_path / "trace.csv"
    code = main(["plan", "--scenario", tiny(tmp_path), "--objective", "time", "--budget", "0.3", "--trace", str(out)])
    assert code == 0
    record = json.loads(capsys.readouterr().out)
    assert record["success"] is True
    lines = out.read_text().splitlines()
    assert lines[0].split(",") == list(TRACE_COLUMNS)
    last = dict(zip(TRACE_COLUMNS, map(float, lines[-1].split(","))))
    assert last["cum_time_s"] == pytest.approx(record["flight_time_s"])
    assert last["x"] == pytest.approx(1000.0)


def test_plan_no_solution(tmp_path):
    path = tiny(tmp_path, wind={"kind": "uniform", "wind": [-20, 0, 0]})
    assert main(["plan", "--scenario", path, "--budget", "0.2"]) == 1


def test_plan_invalid_input(tmp_path, capsys):
    assert main(["plan", "--scenario", str(tmp_path / "none.json")]) == 2
    assert "not found" in capsys.readouterr().err
    (tmp_path / "bad.json").write_text("{")
    assert main(["plan", "--scenario", str(tmp_path / "bad.json")]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["plan", "--scenario", "x", "--objective", "fuel"])
    assert exc.value.code == 2


def test_bench(tmp_path, capsys):
    out = tmp_path / "runs.csv"
    assert main(["bench", "--scenario", tiny(tmp_path), "--runs", "2", "--out", str(out)]) == 0
    assert "success_pct" in capsys.readouterr().out
    assert len(out.read_text().splitlines()) == 3
    assert main(["bench", "--scenario", tiny(tmp_path), "--runs", "2", "--seeds", "1,x"]) == 2


def test_windgen(tmp_path):
    out = tmp_path / "w.json"
    args = ["windgen", "--kind", "updraft", "--center", "0", "0", "--radius", "100", "--strength", "3", "--out", str(out)]
    assert main(args) == 0
    grid = load_wind_grid(out)
    assert tuple(grid.sample((0, 0, 100))) == pytest.approx((0, 0, 3))
    assert main(["windgen", "--kind", "shear", "--magnitude", "4", "--out", str(tmp_path / "s.json")]) == 0
    assert main(["windgen", "--kind", "uniform", "--wind", "1", "2", "3", "--shape", "1", "2", "2", "--out", str(out)]) == 2
