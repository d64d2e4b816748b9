"""Batch experiments: many random instances, repeated annealing runs, summary stats.

Seeds are derived from one master seed with :class:`numpy.random.SeedSequence`:
instance ``i`` uses spawn key ``(0, i)`` and run ``r`` on it uses
``(1, i, r)``.  Results therefore do not depend on worker count or
completion order, and a sweep sees the same instances at every value.
"""
from __future__ import annotations

import csv
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .route_cost import DEFAULT_VARIANT, MIN_COST, CostVariant
from .sa_solver import SaConfig, simulated_annealing
from .scenario import Params, Scenario, generate_random

SWEEP_PARAMETERS = ("time_limit", "budget", "area", "n_locations")


@dataclass(frozen=True)
class ExperimentConfig:
    n_locations: int = 6
    area: float = 0.25  # km^2
    demand_range: tuple[float, float] = (0.5, 2.0)
    instances: int = 50
    runs: int = 20
    sa: SaConfig = field(default_factory=SaConfig)
    objective: int = MIN_COST
    params: Params = field(default_factory=Params)
    reuse_disabled: bool = False
    fixed_battery_weight: float | None = None
    output: str | None = None
    master_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.instances < 1 or self.runs < 1:
            raise ValueError("instances and runs must both be >= 1")
        if self.n_locations < 1 or not self.area > 0:
            raise ValueError("need n_locations >= 1 and a positive area")
        if self.objective not in (0, 1):
            raise ValueError("objective must be 0 (time) or 1 (cost)")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.fixed_battery_weight is not None and not self.fixed_battery_weight > 0:
            raise ValueError("fixed_battery_weight must be positive")

    @property
    def variant(self) -> CostVariant:
        if self.fixed_battery_weight is not None:
            return mode_fixed_battery(self.fixed_battery_weight, reuse=not self.reuse_disabled)
        return mode_reuse_disabled() if self.reuse_disabled else DEFAULT_VARIANT


@dataclass(frozen=True)
class ResultRow:
    instance: int
    min: float
    mean: float
    std: float
    runtime: float  # mean seconds per run

    CSV_FIELDS = ("instance", "min", "mean", "std", "runtime")


@dataclass
class ExperimentResult:
    rows: list[ResultRow]
    objectives: np.ndarray  # (instances, runs)

    @property
    def avg_min(self) -> float:
        return float(np.mean([r.min for r in self.rows]))

    @property
    def avg_mean(self) -> float:
        return float(np.mean([r.mean for r in self.rows]))

    @property
    def avg_std(self) -> float:
        return float(np.mean([r.std for r in self.rows]))

    @property
    def avg_runtime(self) -> float:
        return float(np.mean([r.runtime for r in self.rows]))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(ResultRow.CSV_FIELDS)
            for r in self.rows:
                w.writerow([r.instance, repr(r.min), repr(r.mean), repr(r.std), repr(r.runtime)])
            w.writerow(["average", repr(self.avg_min), repr(self.avg_mean), repr(self.avg_std),
                        repr(self.avg_runtime)])


def mode_reuse_disabled() -> CostVariant:
    """Every route gets its own drone."""
    return CostVariant(reuse=False)


def mode_fixed_battery(weight: float, reuse: bool = True) -> CostVariant:
    """Every route carries a battery of ``weight`` kg."""
    if not weight > 0:
        raise ValueError(f"battery weight must be positive, got {weight}")
    return CostVariant(reuse=reuse, battery_weight=float(weight))


def percent_improvement(x: float, x_prime: float) -> float:
    """``100 * (x - x') / x'``; positive when ``x'`` is the better (smaller) value."""
    if x_prime == 0:
        raise ZeroDivisionError("percent improvement is undefined for x' = 0")
    return 100.0 * (x - x_prime) / x_prime


def instance_seed(master_seed: int, instance: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(master_seed, spawn_key=(0, instance))


def run_seed(master_seed: int, instance: int, run: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(master_seed, spawn_key=(1, instance, run))


def make_instance(cfg: ExperimentConfig, instance: int) -> Scenario:
    return generate_random(cfg.n_locations, cfg.area, cfg.demand_range,
                           seed=instance_seed(cfg.master_seed, instance), params=cfg.params)


def summarize(instance: int, objectives, runtimes) -> ResultRow:
    obj = np.asarray(objectives, dtype=float)
    # population std over the runs of one instance
    return ResultRow(instance, float(obj.min()), float(obj.mean()), float(obj.std()),
                     float(np.mean(runtimes)))


def _run_instance(args):
    cfg, instance = args
    scn = make_instance(cfg, instance)
    objs, times = [], []
    for r in range(cfg.runs):
        sa = replace(cfg.sa, objective=cfg.objective, seed=run_seed(cfg.master_seed, instance, r))
        t0 = time.perf_counter()
        _, bd, _ = simulated_annealing(scn, sa, cfg.variant)
        times.append(time.perf_counter() - t0)
        objs.append(bd.objective(cfg.objective))
    return objs, times


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Anneal every instance ``cfg.runs`` times; per-instance min/mean/std.

    The averages on the result are taken over instances of the
    per-instance statistics.
    """
    jobs = [(cfg, i) for i in range(cfg.instances)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            outcomes = list(pool.map(_run_instance, jobs))
    else:
        outcomes = [_run_instance(job) for job in jobs]
    rows = [summarize(i, objs, times) for i, (objs, times) in enumerate(outcomes)]
    result = ExperimentResult(rows, np.array([objs for objs, _ in outcomes]))
    if cfg.output:
        result.to_csv(cfg.output)
    return result


def config_at(cfg: ExperimentConfig, parameter: str, value) -> ExperimentConfig:
    if parameter in ("time_limit", "budget"):
        return replace(cfg, params=cfg.params.replace(**{parameter: float(value)}))
    if parameter == "area":
        return replace(cfg, area=float(value))
    if parameter == "n_locations":
        return replace(cfg, n_locations=int(value))
    raise ValueError(f"cannot sweep {parameter!r}; choose from {SWEEP_PARAMETERS}")


SWEEP_FIELDS = ("value", "avg_min", "avg_mean", "avg_std")


def sweep(cfg: ExperimentConfig, parameter: str, values, path=None) -> list[dict]:
    """One experiment per value of ``parameter``; optionally written as CSV."""
    values = list(values)
    if not values:
        raise ValueError("no sweep values given")
    if parameter not in SWEEP_PARAMETERS:
        raise ValueError(f"cannot sweep {parameter!r}; choose from {SWEEP_PARAMETERS}")
    out = []
    for v in values:
        res = run_experiment(replace(config_at(cfg, parameter, v), output=None))
        out.append({"value": v, "avg_min": res.avg_min, "avg_mean": res.avg_mean,
                    "avg_std": res.avg_std, "result": res})
    if path is not None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(SWEEP_FIELDS)
            for row in out:
                w.writerow([row["value"]] + [repr(row[k]) for k in SWEEP_FIELDS[1:]])
    return out


def pooled_std(stds) -> float:
    """Root mean square of per-instance standard deviations."""
    stds = np.asarray(stds, dtype=float)
    return math.sqrt(float(np.mean(stds**2)))
