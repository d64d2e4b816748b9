"""Delivery instances: locations, demands and the constants of the model.

Scenario files are JSON.  Infinite budget or time limit is written as the
bare token ``Infinity`` (Python's json dialect); everything else is plain
JSON.  Floats are written with ``repr`` so a save/load round trip is exact.
"""
from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import asdict, dataclass, field, fields
from functools import cached_property
from pathlib import Path

import numpy as np

from .energy_model import LinearPowerModel

FORMAT_TAG = "dronevrp-scenario"
FORMAT_VERSION = 1


class ScenarioFormatError(ValueError):
    """Raised for unreadable or invalid scenario files."""


@dataclass(frozen=True)
class Params:
    """Physical and economic constants.

    Units: $ for money, kg, m/s, s, kJ/kg, $/kJ, kW/kg and kW for the power
    model.  ``budget`` and ``time_limit`` default to infinity so that each
    problem variant only has to set the limit it is constrained by.
    """

    drone_cost: float = 500.0
    capacity: float = 3.0
    speed: float = 6.0
    service_time: float = 60.0
    energy_density: float = 650.0
    energy_price: float = 0.1
    power_model: LinearPowerModel = field(default_factory=lambda: LinearPowerModel(0.217, 0.185))
    max_drones: int = 1000
    budget: float = math.inf
    time_limit: float = math.inf
    big_k: float = 1e6

    def __post_init__(self):
        if isinstance(self.power_model, dict):
            object.__setattr__(self, "power_model", LinearPowerModel(**self.power_model))
        for f in fields(self):
            if f.name == "power_model":
                continue
            value = getattr(self, f.name)
            if not value > 0 or math.isnan(value):
                raise ValueError(f"{f.name} must be positive, got {value}")
        if int(self.max_drones) != self.max_drones:
            raise ValueError("max_drones must be an integer")
        object.__setattr__(self, "max_drones", int(self.max_drones))
        if not self.power_model.beta > 0:
            raise ValueError("power_model.beta must be positive")
        for name in ("drone_cost", "capacity", "speed", "service_time", "energy_density",
                     "energy_price", "big_k"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    def replace(self, **changes) -> "Params":
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data.update(changes)
        return Params(**data)


@dataclass(frozen=True)
class BatteryType:
    weight: float  # kg
    energy: float  # kJ
    cost: float  # $

    def __post_init__(self):
        for name in ("weight", "energy", "cost"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"battery {name} must be positive and finite, got {value}")


@dataclass(frozen=True, eq=False)
class Scenario:
    """A single-depot delivery instance.

    ``locations[0]`` is the depot.  ``demands[i - 1]`` is the package weight
    for location ``i``.
    """

    locations: np.ndarray
    demands: np.ndarray
    params: Params = field(default_factory=Params)
    battery_types: tuple[BatteryType, ...] = ()

    def __post_init__(self):
        loc = np.array(self.locations, dtype=float)
        dem = np.array(self.demands, dtype=float)
        if loc.ndim != 2 or loc.shape[1] != 2 or loc.shape[0] < 1:
            raise ValueError(f"locations must have shape (n+1, 2), got {loc.shape}")
        if dem.shape != (loc.shape[0] - 1,):
            raise ValueError(
                f"expected {loc.shape[0] - 1} demands for {loc.shape[0] - 1} locations, got {dem.size}"
            )
        if not np.all(np.isfinite(loc)):
            raise ValueError("coordinates must be finite")
        if not np.all(dem > 0) or not np.all(np.isfinite(dem)):
            raise ValueError("demands must be positive and finite")
        loc.setflags(write=False)
        dem.setflags(write=False)
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "demands", dem)
        object.__setattr__(self, "battery_types", tuple(self.battery_types))

    @property
    def n_locations(self) -> int:
        """Number of delivery locations, depot excluded."""
        return self.demands.size

    @cached_property
    def demand_vector(self) -> np.ndarray:
        """Demands indexed by location, with 0 for the depot."""
        d = np.concatenate([[0.0], self.demands])
        d.setflags(write=False)
        return d

    @cached_property
    def distances(self) -> np.ndarray:
        diff = self.locations[:, None, :] - self.locations[None, :, :]
        d = np.sqrt((diff**2).sum(axis=-1))
        d.setflags(write=False)
        return d

    @cached_property
    def distance_rows(self) -> list[list[float]]:
        return self.distances.tolist()

    @cached_property
    def demand_list(self) -> list[float]:
        return self.demand_vector.tolist()

    def __eq__(self, other):
        if not isinstance(other, Scenario):
            return NotImplemented
        return (
            np.array_equal(self.locations, other.locations)
            and np.array_equal(self.demands, other.demands)
            and self.params == other.params
            and self.battery_types == other.battery_types
        )

    __hash__ = None

    def with_params(self, **changes) -> "Scenario":
        return Scenario(self.locations, self.demands, self.params.replace(**changes), self.battery_types)


def distance(scn: Scenario, i: int, j: int) -> float:
    """Planar Euclidean distance in metres between locations ``i`` and ``j``."""
    size = scn.locations.shape[0]
    for k in (i, j):
        if not 0 <= k < size:
            raise IndexError(f"location index {k} out of range 0..{size - 1}")
    return float(scn.distances[i, j])


def generate_random(
    n_locations: int,
    area: float,
    demand_range: tuple[float, float] = (0.5, 2.0),
    seed=None,
    params: Params | None = None,
) -> Scenario:
    """Random instance on a square of ``area`` km^2 with the depot at the centre.

    Locations and demands are i.i.d. uniform; ``seed`` goes straight to
    :func:`numpy.random.default_rng` (PCG64), so anything it accepts works.
    """
    if n_locations < 1:
        raise ValueError("need at least one location")
    if not area > 0:
        raise ValueError("area must be positive")
    lo, hi = demand_range
    if not 0 < lo <= hi:
        raise ValueError(f"bad demand range {demand_range}")
    rng = np.random.default_rng(seed)
    side = math.sqrt(area) * 1000.0
    pts = rng.uniform(0.0, side, size=(n_locations, 2))
    demands = rng.uniform(lo, hi, size=n_locations)
    depot = np.array([[side / 2.0, side / 2.0]])
    return Scenario(np.vstack([depot, pts]), demands, params or Params())


def _to_document(scn: Scenario) -> dict:
    params = asdict(scn.params)
    return {
        "format": FORMAT_TAG,
        "version": FORMAT_VERSION,
        "params": params,
        "locations": scn.locations.tolist(),
        "demands": scn.demands.tolist(),
        "battery_types": [asdict(b) for b in scn.battery_types],
    }


def dumps(scn: Scenario) -> str:
    doc = _to_document(scn)
    # one location per line keeps files diffable and error lines meaningful
    head = {k: doc[k] for k in ("format", "version", "params", "battery_types")}
    lines = json.dumps(head, indent=2)[:-2].splitlines()
    lines[-1] += ","
    lines.append('  "locations": [')
    lines += [f"    [{x!r}, {y!r}]," for x, y in doc["locations"]]
    lines[-1] = lines[-1].rstrip(",")
    lines.append("  ],")
    lines.append('  "demands": [')
    lines += [f"    {d!r}," for d in doc["demands"]]
    if doc["demands"]:
        lines[-1] = lines[-1].rstrip(",")
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def save(scn: Scenario, path) -> None:
    Path(path).write_text(dumps(scn), encoding="utf-8")


def _line_of(text: str, key: str) -> int | None:
    m = re.search(rf'"{re.escape(key)}"\s*:', text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def loads(text: str, source: str = "<string>") -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc

    def fail(key, msg):
        line = _line_of(text, key)
        where = f"{source}:{line}" if line else source
        raise ScenarioFormatError(f"{where}: {msg}")

    if not isinstance(doc, dict) or doc.get("format") != FORMAT_TAG:
        fail("format", f"not a {FORMAT_TAG} document")
    if doc.get("version") != FORMAT_VERSION:
        fail("version", f"unsupported version {doc.get('version')!r}")
    for key in ("locations", "demands", "params"):
        if key not in doc:
            fail(key, f"missing '{key}'")

    locations = doc["locations"]
    demands = doc["demands"]
    if not isinstance(locations, list) or not all(
        isinstance(p, list) and len(p) == 2 for p in locations
    ):
        fail("locations", "locations must be a list of [x, y] pairs")
    if not isinstance(demands, list):
        fail("demands", "demands must be a list")
    if len(demands) != len(locations) - 1:
        fail("demands", f"{len(demands)} demand entries for {len(locations) - 1} locations")

    try:
        params = Params(**doc["params"])
    except (TypeError, ValueError) as exc:
        fail("params", f"invalid params: {exc}")
    try:
        batteries = tuple(BatteryType(**b) for b in doc.get("battery_types", []))
    except (TypeError, ValueError) as exc:
        fail("battery_types", f"invalid battery type: {exc}")
    try:
        return Scenario(np.array(locations, dtype=float), np.array(demands, dtype=float), params, batteries)
    except (TypeError, ValueError) as exc:
        fail("demands" if "demand" in str(exc) else "locations", str(exc))


def load(path) -> Scenario:
    path = Path(path)
    return loads(path.read_text(encoding="utf-8"), source=str(path))


def save_distance_csv(scn: Scenario, path) -> None:
    """Write the distance matrix (metres) as CSV, header row = location ids."""
    size = scn.locations.shape[0]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["from\\to"] + list(range(size)))
        for i in range(size):
            w.writerow([i] + [repr(float(v)) for v in scn.distances[i]])
