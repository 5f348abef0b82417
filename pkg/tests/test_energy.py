import math

import numpy as np
import pytest

from oracles import integrate_cost_reference
from windplan.dubins import State, dubins_airplane_connect
from windplan.energy import TRACE_COLUMNS, integrate_cost, path_trace, power, thrust, write_trace
from windplan.kinematics import VehicleModel
from windplan.windfields import HorizontalShear, UpdraftRegion, Uniform

MODEL = VehicleModel()


def level(length=1500.0):
    return dubins_airplane_connect(State(0, 0, 100, 0), State(length, 0, 100, 0), MODEL)


def test_power_closed_forms():
    assert power(0.0, MODEL) == pytest.approx(310.0)
    # 60 + (5 + 5 g sin 20deg) * 15 / 0.3
    expected = 60 + (5 + 5 * 9.80665 * math.sin(math.radians(20))) * 50
    assert power(math.radians(20), MODEL) == pytest.approx(expected)
    assert power(math.radians(20), MODEL) == pytest.approx(1148.5, abs=0.1)


def test_steep_descent_clamps_thrust():
    assert thrust(math.radians(-30), MODEL) == 0.0
    assert power(math.radians(-30), MODEL) == MODEL.avionics_power


def test_level_calm():
    rep = integrate_cost(level(), Uniform(), MODEL)
    assert rep.feasible
    assert rep.flight_time == pytest.approx(100.0)
    assert rep.energy == pytest.approx(31000.0)
    assert rep.value == rep.energy


def test_tailwind_time():
    rep = integrate_cost(level(), Uniform(5, 0, 0), MODEL, "time")
    assert rep.value == pytest.approx(1500.0 / 20.0)


def test_headwind_equal_to_airspeed_is_infinite():
    for obj in ("time", "energy"):
        rep = integrate_cost(level(), Uniform(-15, 0, 0), MODEL, obj)
        assert rep.value == math.inf
        assert not rep.feasible


def test_distance_ignores_wind():
    rep = integrate_cost(level(), Uniform(-15, 0, 0), MODEL, "distance")
    assert rep.value == pytest.approx(1500.0)


def test_zero_length_path():
    s = State(1, 2, 3, 0)
    rep = integrate_cost(dubins_airplane_connect(s, s, MODEL), Uniform(), MODEL)
    assert (rep.value, rep.flight_time, rep.energy) == (0.0, 0.0, 0.0)


def test_bad_arguments():
    with pytest.raises(ValueError):
        integrate_cost(level(), Uniform(), MODEL, "fuel")
    with pytest.raises(ValueError):
        integrate_cost(level(), Uniform(), MODEL, delta_l=0)


@pytest.mark.parametrize("field", [Uniform(3, -2, 0.5), HorizontalShear(20, 8), UpdraftRegion(200, 100, 250, 4)])
@pytest.mark.parametrize("objective", ["time", "energy"])
def test_matches_scalar_reference(field, objective):
    rng = np.random.default_rng(11)
    for _ in range(25):
        a = State(*rng.uniform(-800, 800, 2), rng.uniform(50, 300), rng.uniform(0, 6.28))
        b = State(*rng.uniform(-800, 800, 2), rng.uniform(50, 300), rng.uniform(0, 6.28))
        path = dubins_airplane_connect(a, b, MODEL)
        for dl in (10.0, 7.3):
            got = integrate_cost(path, field, MODEL, objective, dl).value
            ref = integrate_cost_reference(path, field, MODEL, dl, objective)
            if math.isinf(ref):
                assert math.isinf(got)
            else:
                assert got == pytest.approx(ref, rel=1e-12)


def test_energy_converges_with_step():
    path = dubins_airplane_connect(State(0, 0, 100, 0), State(2500, 700, 200, 2.0), MODEL)
    field = Uniform(4, 3, 0)
    coarse = integrate_cost(path, field, MODEL, delta_l=20).energy
    fine = integrate_cost(path, field, MODEL, delta_l=0.5).energy
    assert coarse == pytest.approx(fine, rel=1e-2)


def test_updraft_cheapens_level_flight():
    path = dubins_airplane_connect(State(800, 0, 100, 0), State(1000, 0, 100, 0), MODEL)
    rep = integrate_cost(path, UpdraftRegion(900, 0, 300, 5), MODEL)
    # sinking through the air in the updraft needs no thrust
    assert rep.energy == pytest.approx(60.0 * rep.flight_time)


def test_trace_rows(tmp_path):
    rows = path_trace(level(), Uniform(2, 0, 0), MODEL, 10.0)
    assert len(rows) == 151
    assert rows[0]["cum_time_s"] == 0.0
    assert rows[-1]["s"] == pytest.approx(1500.0)
    assert rows[-1]["cum_energy_J"] == pytest.approx(310.0 * 1500 / 17)
    text = write_trace(rows, tmp_path / "t.csv")
    lines = text.strip().splitlines()
    assert lines[0].split(",") == list(TRACE_COLUMNS)
    assert len(lines) == 152
    assert (tmp_path / "t.csv").read_text() == text
