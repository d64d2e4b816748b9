import csv
from dataclasses import replace

import numpy as np
import pytest

from dronevrp.harness import (
    ExperimentConfig,
    config_at,
    make_instance,
    mode_fixed_battery,
    mode_reuse_disabled,
    percent_improvement,
    pooled_std,
    run_experiment,
    summarize,
    sweep,
)
from dronevrp.route_cost import MIN_COST, MIN_TIME
from dronevrp.sa_solver import SaConfig
from dronevrp.scenario import Params

FAST = SaConfig(cooling_factor=0.5, rounds_per_phase=40)


def small(**kw):
    base = dict(n_locations=5, instances=3, runs=4, sa=FAST, params=Params(time_limit=900.0))
    base.update(kw)
    return ExperimentConfig(**base)


def test_single_run_statistics():
    res = run_experiment(small(instances=1, runs=1))
    row = res.rows[0]
    assert row.min == row.mean and row.std == 0.0
    assert res.objectives.shape == (1, 1)


def test_same_seed_same_numbers():
    a, b = run_experiment(small()), run_experiment(small())
    assert np.array_equal(a.objectives, b.objectives)
    c = run_experiment(small(master_seed=1))
    assert not np.array_equal(a.objectives, c.objectives)


def test_workers_do_not_change_results():
    a = run_experiment(small(instances=2, runs=2))
    b = run_experiment(small(instances=2, runs=2, workers=2))
    assert np.array_equal(a.objectives, b.objectives)


def test_two_level_averages():
    res = run_experiment(small())
    obj = res.objectives
    assert res.avg_min == pytest.approx(np.mean(obj.min(axis=1)), rel=1e-12)
    assert res.avg_mean == pytest.approx(np.mean(obj), rel=1e-12)
    assert res.avg_std == pytest.approx(np.mean(obj.std(axis=1)), rel=1e-12)


def test_summarize_uses_population_std():
    row = summarize(4, [1.0, 3.0], [0.5, 1.5])
    assert (row.instance, row.min, row.mean, row.std, row.runtime) == (4, 1.0, 2.0, 1.0, 1.0)


def test_instances_ignore_sweep_parameter():
    cfg = small()
    a = make_instance(cfg, 2)
    b = make_instance(config_at(cfg, "time_limit", 300.0), 2)
    assert np.array_equal(a.locations, b.locations) and np.array_equal(a.demands, b.demands)
    assert b.params.time_limit == 300.0


def test_objective_selection():
    res = run_experiment(small(objective=MIN_TIME, params=Params(budget=3000.0), instances=1))
    assert res.rows[0].min < 3600  # seconds, not dollars


def test_modes():
    assert mode_reuse_disabled().reuse is False
    v = mode_fixed_battery(0.3)
    assert v.battery_weight == 0.3 and v.reuse
    assert small(fixed_battery_weight=0.3, reuse_disabled=True).variant == mode_fixed_battery(0.3, reuse=False)
    for bad in (0.0, -0.1):
        with pytest.raises(ValueError):
            mode_fixed_battery(bad)


@pytest.mark.parametrize("kw", [dict(instances=0), dict(runs=0), dict(n_locations=0), dict(area=0.0),
                                dict(objective=2), dict(workers=0), dict(fixed_battery_weight=0.0)])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        small(**kw)


def test_percent_improvement():
    assert percent_improvement(150.0, 100.0) == 50.0
    assert percent_improvement(100.0, 100.0) == 0.0
    assert percent_improvement(112.9, 54.6) == pytest.approx(106.84, abs=0.1)
    with pytest.raises(ZeroDivisionError):
        percent_improvement(1.0, 0.0)


def test_experiment_csv(tmp_path):
    path = tmp_path / "exp.csv"
    res = run_experiment(small(output=str(path)))
    rows = list(csv.DictReader(path.open()))
    assert list(rows[0]) == ["instance", "min", "mean", "std", "runtime"]
    assert len(rows) == 4 and rows[-1]["instance"] == "average"
    assert float(rows[-1]["min"]) == res.avg_min


def test_sweep_csv(tmp_path):
    path = tmp_path / "sweep.csv"
    out = sweep(small(instances=2, runs=2), "time_limit", [600.0, 1200.0], path)
    rows = list(csv.DictReader(path.open()))
    assert list(rows[0]) == ["value", "avg_min", "avg_mean", "avg_std"]
    assert [float(r["value"]) for r in rows] == [600.0, 1200.0]
    assert float(rows[1]["avg_min"]) == out[1]["avg_min"]


def test_sweep_errors():
    with pytest.raises(ValueError):
        sweep(small(), "time_limit", [])
    with pytest.raises(ValueError):
        sweep(small(), "speed", [1.0])


def test_sweep_other_parameters():
    cfg = small()
    assert config_at(cfg, "budget", 500).params.budget == 500.0
    assert config_at(cfg, "area", 1.0).area == 1.0
    assert config_at(cfg, "n_locations", 7.0).n_locations == 7


def test_pooled_std():
    assert pooled_std([3.0, 4.0]) == pytest.approx(np.sqrt(12.5))
    assert pooled_std([0.0]) == 0.0
