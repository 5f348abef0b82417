import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from windplan.dubins import State, dubins_airplane_connect
from windplan.kinematics import VehicleModel
from windplan.terrain import ElevationMap, elevation_at, load_elevation_map, motion_clear, save_elevation_map
from windplan.windfields import FormatError

MODEL = VehicleModel()


def flat(z=500.0, n=11):
    return ElevationMap(n, n, (0.0, 0.0), 100.0, [z] * (n * n))


def ramp():
    # elevation = x / 10, three columns, two rows
    return ElevationMap(3, 2, (0.0, 0.0), 100.0, [0, 10, 20, 0, 10, 20])


def level_path(z):
    return dubins_airplane_connect(State(50, 500, z, 0), State(950, 500, z, 0), MODEL)


def test_flat_map():
    m = flat()
    assert elevation_at(m, 123.4, 987.6) == 500.0


def test_node_and_midpoint():
    m = ramp()
    assert elevation_at(m, 100, 0) == 10.0
    assert elevation_at(m, 150, 50) == pytest.approx(15.0)


def test_north_up_orientation():
    # first row of values is the northern edge
    m = ElevationMap(2, 2, (0.0, 0.0), 10.0, [1, 2, 3, 4])
    assert elevation_at(m, 0, 10) == 1.0
    assert elevation_at(m, 10, 10) == 2.0
    assert elevation_at(m, 0, 0) == 3.0
    assert elevation_at(m, 10, 0) == 4.0


def test_outside_map():
    m = flat()
    assert elevation_at(m, -1, 0) == -math.inf
    strict = ElevationMap(2, 2, (0, 0), 10, [0] * 4, strict_bounds=True)
    assert elevation_at(strict, -1, 0) == math.inf
    assert elevation_at(None, 0, 0) == -math.inf


def test_nodata_is_forbidden():
    m = ElevationMap(3, 3, (0, 0), 10, [0, 0, 0, 0, -9999, 0, 0, 0, 0], nodata=-9999)
    assert elevation_at(m, 10, 10) == math.inf
    assert elevation_at(m, 5, 5) == math.inf


def test_invariants():
    with pytest.raises(ValueError):
        ElevationMap(2, 2, (0, 0), 0.0, [0] * 4)
    with pytest.raises(FormatError):
        ElevationMap(2, 2, (0, 0), 1.0, [0] * 3)
    with pytest.raises(FormatError):
        ElevationMap(2, 2, (0, 0), 1.0, [0, 0, 0, math.nan])


def test_motion_clear_examples():
    m = flat()
    assert motion_clear(level_path(1000), m)
    assert not motion_clear(level_path(499), m)
    assert not motion_clear(level_path(549), m, clearance=50)
    assert motion_clear(level_path(551), m, clearance=50)
    assert motion_clear(level_path(10), None)
    with pytest.raises(ValueError):
        motion_clear(level_path(1000), m, ds=0)
    with pytest.raises(ValueError):
        motion_clear(level_path(1000), m, clearance=-1)


def hill():
    x = np.arange(21) * 50.0
    xx, yy = np.meshgrid(x, x[::-1])
    z = 400 * np.exp(-((xx - 500) ** 2 + (yy - 500) ** 2) / 150**2)
    return ElevationMap(21, 21, (0, 0), 50, z.ravel())


paths = st.tuples(
    st.floats(0, 1000), st.floats(0, 1000), st.floats(0, 450), st.floats(0, 6.28),
    st.floats(0, 1000), st.floats(0, 1000), st.floats(0, 450), st.floats(0, 6.28),
)


@settings(max_examples=80, deadline=None)
@given(paths, st.floats(0, 100), st.floats(0, 100))
def test_clearance_monotone(p, c1, c2):
    path = dubins_airplane_connect(State(*p[:4]), State(*p[4:]), MODEL)
    lo, hi = sorted((c1, c2))
    if not motion_clear(path, hill(), lo):
        assert not motion_clear(path, hill(), hi)


@settings(max_examples=80, deadline=None)
@given(paths, st.floats(1, 40))
def test_halving_step_never_clears(p, ds):
    path = dubins_airplane_connect(State(*p[:4]), State(*p[4:]), MODEL)
    if not motion_clear(path, hill(), 0.0, ds):
        assert not motion_clear(path, hill(), 0.0, ds / 2)


def test_round_trip(tmp_path):
    m = hill()
    path = tmp_path / "dem.json"
    save_elevation_map(m, path)
    back = load_elevation_map(path)
    assert np.array_equal(back.values, m.values)
    assert (back.ncols, back.nrows, back.origin, back.cellsize) == (m.ncols, m.nrows, m.origin, m.cellsize)


@pytest.mark.parametrize(
    "mutate, needle",
    [
        (lambda d: d.pop("cellsize"), "cellsize"),
        (lambda d: d.update(ncols=0), "ncols"),
        (lambda d: d.update(values=d["values"][:-1]), "values"),
        (lambda d: d.update(origin=[0]), "origin"),
    ],
)
def test_malformed(mutate, needle):
    doc = json.loads(save_elevation_map(ramp()))
    mutate(doc)
    with pytest.raises(FormatError, match=needle):
        load_elevation_map(doc)
