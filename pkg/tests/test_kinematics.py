import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from windplan.kinematics import (
    VehicleModel,
    feasible_state,
    level_tangent,
    solve_wind_triangle,
    solve_wind_triangle_batch,
)
from windplan.dubins import State

MODEL = VehicleModel()


def test_defaults():
    assert MODEL.turn_radius == 50.0
    assert MODEL.gamma_air_max == pytest.approx(2 * MODEL.gamma_ground_max)


def test_model_validation():
    with pytest.raises(ValueError):
        VehicleModel(mass=-1)
    with pytest.raises(ValueError):
        VehicleModel(gamma_ground_max=math.radians(15))
    m = VehicleModel.from_dict({"mass": 4, "gamma_ground_max_deg": 8, "gamma_air_max_deg": 16})
    assert m.mass == 4.0
    assert VehicleModel.from_dict(m.to_dict()) == m
    with pytest.raises(ValueError):
        VehicleModel.from_dict({"wingspan": 2})


def test_calm_air():
    sol = solve_wind_triangle((1, 0, 0), (0, 0, 0), MODEL)
    assert sol.feasible
    assert sol.ground_speed == 15.0
    assert sol.gamma_air == 0.0


def test_tail_and_head_wind():
    assert solve_wind_triangle((1, 0, 0), (5, 0, 0), MODEL).ground_speed == 20.0
    assert solve_wind_triangle((1, 0, 0), (-5, 0, 0), MODEL).ground_speed == 10.0
    assert not solve_wind_triangle((1, 0, 0), (-15, 0, 0), MODEL).feasible
    assert not solve_wind_triangle((1, 0, 0), (-20, 0, 0), MODEL).feasible


def test_crosswind():
    sol = solve_wind_triangle((1, 0, 0), (0, 9, 0), MODEL)
    assert sol.ground_speed == pytest.approx(12.0)
    assert not solve_wind_triangle((1, 0, 0), (0, 15, 0), MODEL).feasible


def test_vertical_wind_sets_air_climb_angle():
    # level ground track through a 5 m/s updraft: the aircraft sinks through the air
    sol = solve_wind_triangle((1, 0, 0), (0, 0, 5), MODEL)
    assert sol.feasible
    assert sol.gamma_air == pytest.approx(-math.asin(1 / 3))
    assert not solve_wind_triangle((1, 0, 0), (0, 0, 6), MODEL).feasible


def test_tailwind_steepens_air_climb():
    g = MODEL.gamma_ground_max
    u = level_tangent(0.0, g)
    sol = solve_wind_triangle(u, (15, 0, 0), MODEL)
    assert sol.feasible
    assert abs(sol.gamma_air) <= MODEL.gamma_air_max


def test_tangent_must_be_unit():
    with pytest.raises(ValueError):
        solve_wind_triangle((2, 0, 0), (0, 0, 0), MODEL)


def test_feasible_state():
    assert feasible_state(State(0, 0, 0, 0), (3, 0, 0), MODEL)
    assert not feasible_state(State(0, 0, 0, 0), (-16, 0, 0), MODEL)


unit = st.tuples(st.floats(0, 2 * math.pi), st.floats(-0.5, 0.5))
wind = st.tuples(*[st.floats(-25, 25)] * 3)


@settings(max_examples=300)
@given(unit, wind)
def test_batch_agrees_with_scalar(hg, w):
    u = level_tangent(*hg)
    sol = solve_wind_triangle(u, w, MODEL)
    vg, ga, ok = solve_wind_triangle_batch(np.array([u]), np.array([w], dtype=float), MODEL)
    assert bool(ok[0]) == sol.feasible
    if sol.feasible:
        assert vg[0] == pytest.approx(sol.ground_speed, abs=1e-12)
        assert ga[0] == pytest.approx(sol.gamma_air, abs=1e-12)
