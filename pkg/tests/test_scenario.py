import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dronevrp import scenario as sio
from dronevrp.scenario import BatteryType, Params, Scenario, ScenarioFormatError, distance, generate_random


def test_depot_at_centre():
    scn = generate_random(6, 0.25, seed=3)
    assert scn.locations[0].tolist() == [250.0, 250.0]
    assert np.all((scn.locations >= 0) & (scn.locations <= 500))


def test_same_seed_same_instance():
    assert generate_random(6, 0.25, seed=11) == generate_random(6, 0.25, seed=11)
    assert generate_random(6, 0.25, seed=11) != generate_random(6, 0.25, seed=12)


def test_demands_within_range():
    scn = generate_random(500, 1.0, (0.5, 2.0), seed=5)
    assert scn.demands.shape == (500,)
    assert np.all((scn.demands >= 0.5) & (scn.demands <= 2.0))
    assert np.all(scn.demands <= scn.params.capacity)


def test_default_constants():
    p = Params()
    assert (p.drone_cost, p.capacity, p.speed, p.service_time) == (500.0, 3.0, 6.0, 60.0)
    assert (p.energy_density, p.energy_price) == (650.0, 0.1)
    assert (p.power_model.alpha, p.power_model.beta) == (0.217, 0.185)
    assert math.isinf(p.budget) and math.isinf(p.time_limit)


def test_distance_basics():
    scn = Scenario(np.array([[0.0, 0.0], [3.0, 4.0], [-1.0, 2.0]]), np.array([1.0, 1.0]))
    assert distance(scn, 0, 1) == 5.0
    assert distance(scn, 2, 2) == 0.0
    assert distance(scn, 1, 2) == distance(scn, 2, 1)
    with pytest.raises(IndexError):
        distance(scn, 0, 3)
    with pytest.raises(IndexError):
        distance(scn, -1, 0)


@given(st.integers(0, 10_000))
def test_triangle_inequality(seed):
    scn = generate_random(8, 1.0, seed=seed)
    d = scn.distances
    for i in range(9):
        for j in range(9):
            assert np.all(d[i, j] <= d[i, :] + d[:, j] + 1e-9)


@given(st.integers(0, 10_000), st.integers(1, 30))
def test_round_trip_exact(seed, n):
    scn = generate_random(n, 0.7, seed=seed, params=Params(budget=1234.5, max_drones=7))
    back = sio.loads(sio.dumps(scn))
    assert back == scn
    assert back.locations.tobytes() == scn.locations.tobytes()


def test_round_trip_file_with_batteries(tmp_path):
    scn = Scenario(np.array([[0.0, 0.0], [1.5, 2.5]]), np.array([0.7]), Params(time_limit=600.0),
                   (BatteryType(0.2, 100.0, 5.0), BatteryType(0.4, 300.0, 8.0)))
    path = tmp_path / "s.json"
    sio.save(scn, path)
    assert sio.load(path) == scn
    assert "Infinity" in path.read_text()


def test_missing_demand_entry():
    doc = sio.dumps(generate_random(3, 0.25, seed=1))
    data = json.loads(doc)
    data["demands"] = data["demands"][:-1]
    with pytest.raises(ScenarioFormatError, match="demand"):
        sio.loads(json.dumps(data, indent=2), source="broken.json")


def test_negative_demand_rejected_with_line():
    text = sio.dumps(generate_random(3, 0.25, seed=1))
    lines = text.splitlines()
    k = lines.index('  "demands": [') + 2
    lines[k] = "    -1.0,"
    with pytest.raises(ScenarioFormatError) as info:
        sio.loads("\n".join(lines), source="neg.json")
    assert "neg.json:" in str(info.value)


def test_syntax_error_reports_line():
    with pytest.raises(ScenarioFormatError, match=r"bad.json:3:"):
        sio.loads('{\n "format": "dronevrp-scenario",\n oops\n}', source="bad.json")


def test_wrong_format_tag():
    with pytest.raises(ScenarioFormatError):
        sio.loads('{"format": "other", "version": 1}')


def test_params_validation():
    with pytest.raises(ValueError):
        Params(capacity=0.0)
    with pytest.raises(ValueError):
        Params(max_drones=2.5)
    with pytest.raises(ValueError):
        Params(power_model={"alpha": 0.2, "beta": -0.1})
    with pytest.raises(ValueError):
        Scenario(np.zeros((2, 2)), np.array([0.0]))
    with pytest.raises(ValueError):
        Scenario(np.zeros((3, 2)), np.array([1.0]))
    with pytest.raises(ValueError):
        BatteryType(0.0, 1.0, 1.0)


def test_scenario_is_read_only():
    scn = generate_random(3, 0.25, seed=1)
    with pytest.raises(ValueError):
        scn.demands[0] = 5.0


def test_distance_csv(tmp_path):
    scn = generate_random(3, 0.25, seed=1)
    path = tmp_path / "d.csv"
    sio.save_distance_csv(scn, path)
    rows = path.read_text().splitlines()
    assert len(rows) == 5
    assert float(rows[2].split(",")[1]) == scn.distances[1, 0]
