"""Mixed-integer linear program for the delivery problems: build, export, check.

Nothing here solves the program.  :func:`export_lp` writes CPLEX LP text
for an external solver, and :func:`validate_assignment` checks a concrete
point against every row, which is how heuristic solutions are verified.

Variables (``n`` delivery locations, depot ``0``):

==============  =========================  ======================================
name            index range                meaning
==============  =========================  ======================================
``x_i_j``       i != j in 0..n             drone flies i -> j (binary)
``z_i_j``       i != j in 1..n             drone ends a route at i, next starts at j (binary)
``f_i_j``       i != j in 0..n             payload on edge, kg
``bw_i_j``      i != j in 0..n             battery weight on edge, kg
``b_i``         1..n                       battery weight at location, kg
``a_i``         1..n                       visit time, s
``r_i``         1..n                       depot return time after i, s (0 if i is not last)
``e_i``         1..n                       energy used on arrival at i, kJ
``g_i``         1..n                       energy of the route ending at i, kJ (0 otherwise)
``l``, ``c``                               overall delivery time, total cost
``h_k_i``       type k, location 1..n      battery type k on the route ending at i (binary)
==============  =========================  ======================================

Depot visit time and depot energy are the constant 0, so they are not
variables.  Row names are ``c<group>_<indices>``, e.g. ``c4a_3`` or
``c7a_0_3``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .route_cost import (
    MIN_COST,
    MIN_TIME,
    DEFAULT_VARIANT,
    _energy_sweep,
    check_solution,
    discrete_battery_assign,
    route_accumulators,
    split_routes,
)
from .scenario import BatteryType, Scenario

GROUPS = ("4a", "4b", "5a", "5b", "5c", "6a", "6b", "7a", "7b", "7c", "7d", "7e", "7r",
          "8a", "8b", "8c", "8d", "8e", "9a", "9b", "9c", "10a", "10b", "bt")
MAX_LINE = 250


class ConversionError(ValueError):
    pass


class MissingValueError(KeyError):
    pass


@dataclass(frozen=True)
class Row:
    name: str
    group: str
    terms: tuple[tuple[str, float], ...]
    sense: str  # "<=", ">=" or "="
    rhs: float


@dataclass
class MilpModel:
    n_locations: int
    objective: str  # "l" or "c"
    variables: dict[str, str] = field(default_factory=dict)  # name -> "binary" | "continuous"
    rows: list[Row] = field(default_factory=list)
    big_k: dict[str, float] = field(default_factory=dict)
    battery_types: tuple[BatteryType, ...] = ()

    def group(self, g: str) -> list[Row]:
        return [r for r in self.rows if r.group == g]

    def group_counts(self) -> dict[str, int]:
        counts = {}
        for r in self.rows:
            counts[r.group] = counts.get(r.group, 0) + 1
        return counts


MilpAssignment = dict  # variable name -> value


@dataclass(frozen=True)
class Violation:
    constraint: str
    amount: float  # how far past the bound, always > tol
    tolerance: float

    def __str__(self):
        return f"{self.constraint}: violated by {self.amount:.6g} (tol {self.tolerance:.3g})"


def expected_variable_count(n: int, n_types: int = 0) -> int:
    return 3 * n * (n + 1) + n * (n - 1) + 5 * n + 2 + n_types * n


def expected_row_counts(n: int, time_limited: bool, budget_limited: bool,
                        n_types: int = 0) -> dict[str, int]:
    counts = {g: n for g in ("4a", "5a", "5b", "6a", "7b", "7d", "7r", "8b", "8e", "9b", "9c")}
    counts.update({"4b": n + 1, "5c": 1, "10a": 1})
    counts.update({g: n * (n + 1) for g in ("6b", "8a")})
    counts.update({g: n * n for g in ("7a", "8d", "9a")})
    counts.update({g: n * (n - 1) for g in ("7c", "8c")})
    if time_limited:
        counts["7e"] = 1
    if budget_limited:
        counts["10b"] = 1
    if n_types:
        counts["bt"] = n
    return {g: c for g, c in counts.items() if c}


def _leg_time(scn: Scenario, i: int, j: int) -> float:
    p = scn.params
    return p.service_time + scn.distance_rows[i][j] / p.speed


def _safe_big_k(scn: Scenario, types: Sequence[BatteryType]) -> dict[str, float]:
    """Smallest constants that keep each switched-off row slack.

    Any sensible solution finishes within ``2 n`` legs of the longest leg
    (one drone flying every location as its own route), and no battery
    outweighs the capacity.
    """
    p = scn.params
    n = scn.n_locations
    t_max = max(_leg_time(scn, i, j) for i in range(n + 1) for j in range(n + 1) if i != j)
    horizon = min(p.time_limit, 2 * n * t_max) + 2 * t_max
    alpha, beta = p.power_model.alpha, p.power_model.beta
    energy_cap = max(p.energy_density * p.capacity, sum(b.energy for b in types))
    weight_cap = max(p.capacity, sum(b.weight for b in types))
    safe = {
        "time": horizon,
        "payload": p.capacity,
        "battery": weight_cap,
        "energy": energy_cap + (alpha * p.capacity + beta) * t_max,
    }
    return {k: min(p.big_k, v) for k, v in safe.items()}


def build_model(scn: Scenario, objective=MIN_COST,
                battery_types: Sequence[BatteryType] | None = None) -> MilpModel:
    """Variables and rows of the delivery MILP.

    ``objective`` is ``MIN_TIME``/``"min_time"`` (minimise ``l``) or
    ``MIN_COST``/``"min_cost"`` (minimise ``c``).  With ``battery_types`` the
    continuous battery is replaced by a pick of discrete battery types.
    Limit rows are emitted only for finite limits.
    """
    if objective in (MIN_TIME, "min_time"):
        obj = "l"
    elif objective in (MIN_COST, "min_cost"):
        obj = "c"
    else:
        raise ValueError(f"unknown objective {objective!r}")
    types = tuple(battery_types or ())
    p = scn.params
    n = scn.n_locations
    alpha, beta = p.power_model.alpha, p.power_model.beta
    K = _safe_big_k(scn, types)
    model = MilpModel(n, obj, big_k=K, battery_types=types)
    var = model.variables
    nodes = range(n + 1)
    locs = range(1, n + 1)
    edges = [(i, j) for i in nodes for j in nodes if i != j]

    for i, j in edges:
        var[f"x_{i}_{j}"] = "binary"
    for i in locs:
        for j in locs:
            if i != j:
                var[f"z_{i}_{j}"] = "binary"
    for prefix in ("f", "bw"):
        for i, j in edges:
            var[f"{prefix}_{i}_{j}"] = "continuous"
    for prefix in ("b", "a", "r", "e", "g"):
        for i in locs:
            var[f"{prefix}_{i}"] = "continuous"
    var["l"] = "continuous"
    var["c"] = "continuous"
    for k in range(len(types)):
        for i in locs:
            var[f"h_{k}_{i}"] = "binary"

    rows = model.rows

    def add(group, idx, terms, sense, rhs):
        name = "c" + group + "_" + "_".join(str(v) for v in idx) if idx else "c" + group
        merged = {}
        for v, coef in terms:
            merged[v] = merged.get(v, 0.0) + float(coef)
        rows.append(Row(name, group, tuple((v, c) for v, c in merged.items() if c != 0.0),
                        sense, float(rhs)))

    def others(i, pool):
        return [j for j in pool if j != i]

    # flow
    for i in locs:
        add("4a", (i,), [(f"x_{i}_{j}", 1) for j in others(i, nodes)], "=", 1)
    for i in nodes:
        add("4b", (i,), [(f"x_{i}_{j}", 1) for j in others(i, nodes)]
            + [(f"x_{j}_{i}", -1) for j in others(i, nodes)], "=", 0)

    # reuse and fleet size
    for i in locs:
        add("5a", (i,), [(f"z_{i}_{j}", 1) for j in others(i, locs)] + [(f"x_{i}_0", -1)], "<=", 0)
    for i in locs:
        add("5b", (i,), [(f"z_{j}_{i}", 1) for j in others(i, locs)] + [(f"x_0_{i}", -1)], "<=", 0)
    add("5c", (), [(f"x_0_{i}", 1) for i in locs]
        + [(f"z_{i}_{j}", -1) for i in locs for j in others(i, locs)], "<=", p.max_drones)

    # payload
    for i in locs:
        add("6a", (i,), [(f"f_{j}_{i}", 1) for j in others(i, nodes)]
            + [(f"f_{i}_{j}", -1) for j in others(i, nodes)], "=", scn.demand_list[i])
    for i, j in edges:
        add("6b", (i, j), [(f"f_{i}_{j}", 1), (f"x_{i}_{j}", -K["payload"])], "<=", 0)

    # timing: a_j >= a_i + t_ij on used edges, with a_0 = 0
    kt = K["time"]
    for i in nodes:
        for j in others(i, locs):
            t = _leg_time(scn, i, j)
            terms = [(f"a_{j}", -1), (f"x_{i}_{j}", kt)]
            if i:
                terms.insert(0, (f"a_{i}", 1))
            add("7a", (i, j), terms, "<=", kt - t)
    for i in locs:
        add("7b", (i,), [(f"a_{i}", 1), (f"r_{i}", -1), (f"x_{i}_0", kt)], "<=",
            kt - _leg_time(scn, i, 0))
    for i in locs:
        for j in others(i, locs):
            add("7c", (i, j), [(f"r_{i}", 1), (f"a_{j}", -1), (f"z_{i}_{j}", kt)], "<=",
                kt - _leg_time(scn, 0, j))
    for i in locs:
        add("7d", (i,), [(f"a_{i}", 1), ("l", -1)], "<=", 0)
    if math.isfinite(p.time_limit):
        add("7e", (), [("l", 1)], "<=", p.time_limit)
    for i in locs:
        # r_i vanishes off the route ends, mirroring the guard on g_i
        add("7r", (i,), [(f"r_{i}", 1), (f"x_{i}_0", -kt)], "<=", 0)

    # capacity and battery weight
    kb = K["battery"]
    for i, j in edges:
        add("8a", (i, j), [(f"bw_{i}_{j}", 1), (f"f_{i}_{j}", 1), (f"x_{i}_{j}", -p.capacity)], "<=", 0)
    for i in locs:
        if types:
            weight = [(f"h_{k}_{i}", b.weight) for k, b in enumerate(types)]
        else:
            weight = [(f"g_{i}", 1.0 / p.energy_density)]
        add("8b", (i,), weight + [(f"b_{i}", -1), (f"x_{i}_0", kb)], "<=", kb)
    for i in locs:
        for j in others(i, locs):
            add("8c", (i, j), [(f"b_{i}", 1), (f"b_{j}", -1), (f"x_{j}_{i}", kb)], "<=", kb)
    for i in nodes:
        for j in others(i, locs):
            add("8d", (i, j), [(f"bw_{i}_{j}", 1), (f"b_{j}", -1), (f"x_{i}_{j}", -kb)], ">=", -kb)
    for i in locs:
        add("8e", (i,), [(f"bw_{i}_0", 1), (f"b_{i}", -1), (f"x_{i}_0", -kb)], ">=", -kb)

    # energy: power is alpha * (battery + payload) + beta over each leg
    ke = K["energy"]
    for i in nodes:
        for j in others(i, locs):
            t = _leg_time(scn, i, j)
            terms = [(f"e_{j}", -1), (f"bw_{i}_{j}", alpha * t), (f"f_{i}_{j}", alpha * t),
                     (f"x_{i}_{j}", ke)]
            if i:
                terms.insert(0, (f"e_{i}", 1))
            add("9a", (i, j), terms, "<=", ke - beta * t)
    for i in locs:
        t = _leg_time(scn, i, 0)
        add("9b", (i,), [(f"e_{i}", 1), (f"g_{i}", -1), (f"bw_{i}_0", alpha * t),
                         (f"f_{i}_0", alpha * t), (f"x_{i}_0", ke)], "<=", ke - beta * t)
    for i in locs:
        add("9c", (i,), [(f"g_{i}", 1), (f"x_{i}_0", -ke)], "<=", 0)

    # cost
    terms = [("c", 1)] + [(f"x_0_{i}", -p.drone_cost) for i in locs]
    terms += [(f"z_{i}_{j}", p.drone_cost) for i in locs for j in others(i, locs)]
    if types:
        terms += [(f"h_{k}_{i}", -b.cost) for i in locs for k, b in enumerate(types)]
    else:
        terms += [(f"g_{i}", -p.energy_price) for i in locs]
    add("10a", (), terms, "=", 0)
    if math.isfinite(p.budget):
        add("10b", (), [("c", 1)], "<=", p.budget)

    if types:
        for i in locs:
            add("bt", (i,), [(f"h_{k}_{i}", b.energy) for k, b in enumerate(types)]
                + [(f"g_{i}", -1)], ">=", 0)
    return model


def _num(v: float) -> str:
    return repr(float(v))


def _expr(terms) -> list[str]:
    out = []
    for k, (v, coef) in enumerate(terms):
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        body = v if mag == 1.0 else f"{_num(mag)} {v}"
        out.append((f"- {body}" if sign == "-" else body) if k == 0 else f"{sign} {body}")
    return out


def _wrap(head: str, tokens: list[str], tail: str) -> list[str]:
    lines, cur = [], head
    for tok in tokens + ([tail] if tail else []):
        if len(cur) + 1 + len(tok) > MAX_LINE:
            lines.append(cur)
            cur = "   " + tok
        else:
            cur = f"{cur} {tok}" if cur.strip() else cur + tok
    lines.append(cur)
    return lines


def lp_text(model: MilpModel) -> str:
    """The model in CPLEX LP format."""
    lines = [f"\\ delivery MILP, {model.n_locations} locations, minimise {model.objective}",
             "Minimize", f" obj: {model.objective}", "Subject To"]
    for r in model.rows:
        lines += _wrap(f" {r.name}:", _expr(r.terms), f"{r.sense} {_num(r.rhs)}")
    lines.append("Bounds")
    for v, kind in model.variables.items():
        if kind == "continuous":
            lines.append(f" {v} >= 0")
    lines.append("Binaries")
    lines += _wrap("", [v for v, kind in model.variables.items() if kind == "binary"], "")
    lines.append("End")
    return "\n".join(lines) + "\n"


def export_lp(model: MilpModel, path) -> None:
    Path(path).write_text(lp_text(model), encoding="ascii")


def row_activity(row: Row, asn: Mapping[str, float]) -> float:
    return math.fsum(coef * asn[v] for v, coef in row.terms)


def validate_assignment(model: MilpModel, asn: Mapping[str, float], tol: float = 1e-6) -> list[Violation]:
    """Every row or bound violated by more than ``tol``.

    The tolerance scales with the largest term in the row, so rows holding
    big-K coefficients are judged relative to their size.
    """
    missing = [v for v in model.variables if v not in asn]
    if missing:
        raise MissingValueError(f"no value for {len(missing)} variables, e.g. {missing[:5]}")
    out = []
    for v, kind in model.variables.items():
        val = asn[v]
        if kind == "binary":
            dist = min(abs(val), abs(val - 1.0))
            if dist > tol:
                out.append(Violation(f"binary:{v}", dist, tol))
        elif val < -tol:
            out.append(Violation(f"bound:{v}", -val, tol))
    for r in model.rows:
        lhs = row_activity(r, asn)
        scale = max([1.0, abs(r.rhs)] + [abs(c * asn[v]) for v, c in r.terms])
        if r.sense == "<=":
            excess = lhs - r.rhs
        elif r.sense == ">=":
            excess = r.rhs - lhs
        else:
            excess = abs(lhs - r.rhs)
        if excess > tol * scale:
            out.append(Violation(r.name, excess, tol * scale))
    return out


def objective_value(model: MilpModel, asn: Mapping[str, float]) -> float:
    return float(asn[model.objective])


def string_to_assignment(s, schedule, scn: Scenario,
                         battery_types: Sequence[BatteryType] | None = None) -> MilpAssignment:
    """MILP point equivalent to a solution string.

    ``schedule`` gives the drone of each non-empty route in string order,
    either as drone ids or as ``(drone, start)`` pairs like
    :func:`route_cost.schedule_routes` returns.  A drone flies its routes
    back to back in string order.  Without ``battery_types`` each route
    carries exactly the battery its energy needs; with them, the cheapest
    covering pick of types.
    """
    p = scn.params
    n = scn.n_locations
    s = check_solution(s, n).tolist()
    routes = split_routes(s)
    drones = [d[0] if isinstance(d, tuple) else d for d in schedule]
    if len(drones) != len(routes):
        raise ConversionError(f"schedule covers {len(drones)} routes, solution has {len(routes)}")
    if len(set(drones)) > p.max_drones:
        raise ConversionError(f"schedule uses {len(set(drones))} drones, at most {p.max_drones} allowed")
    types = tuple(battery_types or ())
    if not types:
        _, _, penalized = _energy_sweep(s, scn, DEFAULT_VARIANT)
        if penalized:
            raise ConversionError("solution violates capacity or energy limits")

    model = build_model(scn, MIN_COST, types)
    asn = {v: 0.0 for v in model.variables}
    alpha, beta = p.power_model.alpha, p.power_model.beta
    dem = scn.demand_list
    free_at: dict[int, float] = {}
    previous_end: dict[int, int] = {}
    energy_cost = 0.0

    for route, drone in zip(routes, drones):
        t_route, omega, payload = route_accumulators(route, scn)
        if types:
            picks, pick_cost = discrete_battery_assign(t_route, omega, types, p.power_model)
            battery = sum(types[k].weight for k in picks)
            if battery + payload > p.capacity:
                raise ConversionError(f"route {route} exceeds capacity with its batteries")
            energy_cost += pick_cost
            for k in picks:
                asn[f"h_{k}_{route[-1]}"] = 1.0
        else:
            battery = None  # filled from the closed form below

        stops = [0, *route, 0]
        start = free_at.get(drone, 0.0)
        if drone in previous_end:
            asn[f"z_{previous_end[drone]}_{route[0]}"] = 1.0
        clock, used, load = start, 0.0, payload
        if battery is None:
            num = alpha * omega + beta * t_route
            battery = num / (1.0 - (alpha / p.energy_density) * t_route) / p.energy_density
        for i, j in zip(stops, stops[1:]):
            leg = _leg_time(scn, i, j)
            asn[f"x_{i}_{j}"] = 1.0
            asn[f"f_{i}_{j}"] = load
            asn[f"bw_{i}_{j}"] = battery
            clock += leg
            used += (alpha * (battery + load) + beta) * leg
            if j:
                asn[f"a_{j}"] = clock
                asn[f"e_{j}"] = used
                asn[f"b_{j}"] = battery
                load -= dem[j]
        last = route[-1]
        asn[f"r_{last}"] = clock
        asn[f"g_{last}"] = used
        if not types:
            energy_cost += used * p.energy_price
        free_at[drone] = clock
        previous_end[drone] = last

    asn["l"] = max((asn[f"a_{i}"] for i in range(1, n + 1)), default=0.0)
    asn["c"] = p.drone_cost * len(set(drones)) + energy_cost
    return asn
