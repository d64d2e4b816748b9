"""Cost and overall delivery time of a solution string.

A solution is a flat sequence of location indices where ``0`` (the depot)
separates routes, e.g. ``[0, 1, 2, 0, 0, 3, 0]`` is two routes and one
empty route.  Strings produced by the annealer always hold ``n + 1``
zeros; the evaluators here accept any count of at least two so that
canonical forms like ``[0, 1, 2, 0]`` can be costed too.

This module is the readable reference implementation.  The annealer runs a
compiled copy of the same arithmetic (``_kernels``), and the test suite
checks the two agree bit for bit.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .energy_model import LinearPowerModel
from .scenario import BatteryType, Scenario

MIN_COST = 1  # Phi = 1: minimise total cost under a time limit
MIN_TIME = 0  # Phi = 0: minimise overall delivery time under a budget

RouteTiming = list  # list of (delivery_time, arrival_time) pairs, one per non-empty route


class InvalidSolutionError(ValueError):
    pass


class InfeasibleBatteryError(ValueError):
    """No combination of battery types supplies enough energy."""


@dataclass(frozen=True)
class CostVariant:
    """Ablations of the cost function.

    ``reuse=False`` gives every route its own drone.  ``battery_weight``
    fixes the battery on every route to that many kg instead of sizing it
    to the route.
    """

    reuse: bool = True
    battery_weight: float | None = None

    def __post_init__(self):
        if self.battery_weight is not None and not self.battery_weight > 0:
            raise ValueError(f"battery_weight must be positive, got {self.battery_weight}")


DEFAULT_VARIANT = CostVariant()


@dataclass(frozen=True)
class CostBreakdown:
    energy_cost: float
    drone_cost: float
    total_cost: float
    delivery_time: float
    drone_count: int
    penalized: bool
    route_energies: tuple[float, ...]

    def objective(self, phi: int) -> float:
        return self.total_cost if phi else self.delivery_time

    CSV_FIELDS = ("energy_cost", "drone_cost", "total_cost", "delivery_time", "drone_count",
                  "penalized", "routes")

    def as_row(self) -> dict:
        return {
            "energy_cost": self.energy_cost,
            "drone_cost": self.drone_cost,
            "total_cost": self.total_cost,
            "delivery_time": self.delivery_time,
            "drone_count": self.drone_count,
            "penalized": int(self.penalized),
            "routes": len(self.route_energies),
        }


def check_solution(s: Sequence[int], n_locations: int, strict: bool = False) -> np.ndarray:
    """Validate a solution string and return it as an int array.

    ``strict`` additionally requires exactly ``n_locations + 1`` zeros.
    """
    arr = np.asarray(s)
    if arr.ndim != 1 or arr.size < 2:
        raise InvalidSolutionError("solution must be a 1-D sequence of length >= 2")
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise InvalidSolutionError("solution entries must be integers")
        arr = arr.astype(np.int64)
    if arr[0] != 0 or arr[-1] != 0:
        raise InvalidSolutionError("solution must start and end at the depot")
    visits = arr[arr != 0]
    if visits.size != n_locations or not np.array_equal(np.sort(visits), np.arange(1, n_locations + 1)):
        raise InvalidSolutionError(f"every location 1..{n_locations} must appear exactly once")
    if strict and arr.size - visits.size != n_locations + 1:
        raise InvalidSolutionError(f"expected {n_locations + 1} depot separators")
    return arr.astype(np.int64, copy=False)


def split_routes(s: Sequence[int]) -> list[tuple[int, ...]]:
    """Non-empty routes of ``s`` in string order, depot excluded."""
    routes, cur = [], []
    for k in list(s)[1:]:
        if k == 0:
            if cur:
                routes.append(tuple(cur))
            cur = []
        else:
            cur.append(int(k))
    return routes


def join_routes(routes: Sequence[Sequence[int]], n_locations: int | None = None) -> np.ndarray:
    """Inverse of :func:`split_routes`; pads with empty routes up to ``n_locations + 1`` zeros."""
    out = [0]
    for r in routes:
        out += list(r) + [0]
    if n_locations is not None:
        out += [0] * (n_locations + 1 - (len(routes) + 1))
    return np.array(out, dtype=np.int64)


def battery_energy(route_time: float, time_weight_product: float, model: LinearPowerModel,
                   energy_density: float) -> float:
    """Energy (kJ) a route needs when the battery must also lift itself.

    Solves ``E = sum_k P(payload_k + E / xi) * t_k`` for ``E``.  Past the
    pole at ``t = xi / alpha`` the value is negative (or infinite exactly at
    it); callers penalise such routes.
    """
    num = model.alpha * time_weight_product + model.beta * route_time
    den = 1.0 - (model.alpha / energy_density) * route_time
    if den == 0.0:
        return math.inf if num > 0 else 0.0
    return num / den


def _route_accounting(t, omega, y, scn: Scenario, variant: CostVariant):
    """Energy cost, battery energy and penalty flag of one finished route."""
    p = scn.params
    alpha, beta = p.power_model.alpha, p.power_model.beta
    xi, eps, K, Q = p.energy_density, p.energy_price, p.big_k, p.capacity
    penalized = False
    if variant.battery_weight is None:
        E = battery_energy(t, omega, p.power_model, xi)
        if not math.isfinite(E):
            E = K * K
        if E > 0:
            lam = E * eps
        else:
            lam = -K * (E * eps)
            penalized = True
        battery = E / xi
    else:
        b = variant.battery_weight
        E = xi * b
        lam = E * eps
        needed = alpha * (omega + b * t) + beta * t
        if needed > E:
            lam += K * (needed - E) * eps
            penalized = True
        battery = b
    if y + battery > Q:
        lam += K * (y + battery - Q)
        penalized = True
    return lam, E, penalized


def _energy_sweep(s, scn: Scenario, variant: CostVariant):
    """Back-to-front pass; returns (lambda, energies in string order, penalized)."""
    p = scn.params
    d, dem = scn.distance_rows, scn.demand_list
    tau, v = p.service_time, p.speed
    t = omega = y = 0.0
    lam = 0.0
    energies = []
    penalized = False
    for k in range(len(s) - 2, -1, -1):
        i, j = s[k + 1], s[k]
        if i != 0 or j != 0:
            tij = tau + d[i][j] / v
            t += tij
            omega += y * tij
            y += dem[j]
            if j == 0 and i != 0:
                cost, E, pen = _route_accounting(t, omega, y, scn, variant)
                lam += cost
                energies.append(E)
                penalized |= pen
                t = omega = y = 0.0
    energies.reverse()
    return lam, energies, penalized


def energy_cost(s: Sequence[int], scn: Scenario, variant: CostVariant = DEFAULT_VARIANT):
    """Cost of energy for ``s`` and the battery energy of each route (kJ).

    Capacity and energy violations are folded into the returned cost as
    big-K penalties.
    """
    s = check_solution(s, scn.n_locations).tolist()
    lam, energies, _ = _energy_sweep(s, scn, variant)
    return lam, energies


def route_times(s: Sequence[int], scn: Scenario) -> RouteTiming:
    """(delivery time, depot arrival time) of each non-empty route, each from t=0."""
    s = check_solution(s, scn.n_locations).tolist()
    return _route_times(s, scn)


def _route_times(s, scn: Scenario) -> RouteTiming:
    d = scn.distance_rows
    tau, v = scn.params.service_time, scn.params.speed
    p = q = 0.0
    out = []
    for k in range(1, len(s)):
        i, j = s[k], s[k - 1]
        if i != 0 or j != 0:
            p = q
            q += tau + d[i][j] / v
            if i == 0 and j != 0:
                out.append((p, q))
                q = 0.0
    return out


def list_schedule(u: RouteTiming, n: int) -> float:
    """Overall delivery time when routes are handed, in order, to the
    first drone back at the depot (lowest index on ties)."""
    if n < 1:
        raise ValueError("need at least one drone")
    if n >= len(u):
        return max((p for p, _ in u), default=0.0)
    heap = [(0.0, i, 0.0) for i in range(n)]
    latest = 0.0
    for p, q in u:
        arrival, idx, _ = heap[0]
        heapq.heapreplace(heap, (arrival + q, idx, arrival + p))
        latest = max(latest, arrival + p)
    return latest


def schedule_routes(u: RouteTiming, n: int) -> list[tuple[int, float]]:
    """Drone index and start time of each route under :func:`list_schedule`."""
    if n < 1:
        raise ValueError("need at least one drone")
    heap = [(0.0, i) for i in range(min(n, max(len(u), 1)))]
    out = []
    for _, q in u:
        arrival, idx = heapq.heappop(heap)
        out.append((idx, arrival))
        heapq.heappush(heap, (arrival + q, idx))
    return out


def _drone_count(u, lam, phi, scn: Scenario, variant: CostVariant) -> int:
    p = scn.params
    if not variant.reuse:
        return max(len(u), 1)
    if phi:
        lo, hi = 1, p.max_drones
        while lo <= hi - 1:
            mid = lo + (hi - lo) // 2
            if list_schedule(u, mid) <= p.time_limit:
                hi = mid
            else:
                lo = mid + 1
        n = lo
        if list_schedule(u, n) > p.time_limit:
            n = hi
        return n
    spare = (p.budget - lam) / p.drone_cost
    if spare >= p.max_drones:
        return p.max_drones
    return max(int(math.floor(spare)), 1)


def drone_cost_and_delivery_time(s: Sequence[int], lam: float, phi: int, scn: Scenario,
                                 variant: CostVariant = DEFAULT_VARIANT):
    """Returns ``(drone cost, overall delivery time, drone count)``.

    Minimising cost: binary search for the fewest drones meeting the time
    limit.  Minimising time: buy as many drones as the budget left after
    energy allows (at least one, at most ``max_drones``).
    """
    s = check_solution(s, scn.n_locations).tolist()
    u = _route_times(s, scn)
    return _drone_part(u, lam, phi, scn, variant)


def _drone_part(u, lam, phi, scn, variant):
    n = _drone_count(u, lam, phi, scn, variant)
    return n * scn.params.drone_cost, list_schedule(u, n), n


def apply_limits(c: float, l: float, scn: Scenario) -> tuple[float, float, bool]:
    """Budget first, then time limit; at most one of the two penalties applies."""
    p = scn.params
    if c > p.budget:
        excess = c - p.budget
        return c + p.big_k * excess, l + p.big_k * excess, True
    if l > p.time_limit:
        excess = l - p.time_limit
        return c + p.big_k * excess, l + p.big_k * excess, True
    return c, l, False


def cost(s: Sequence[int], phi: int, scn: Scenario,
         variant: CostVariant = DEFAULT_VARIANT) -> CostBreakdown:
    """Total cost and overall delivery time of ``s``, penalties included."""
    s = check_solution(s, scn.n_locations).tolist()
    lam, energies, pen_energy = _energy_sweep(s, scn, variant)
    u = _route_times(s, scn)
    return finish_cost(lam, energies, pen_energy, u, phi, scn, variant)


def finish_cost(lam, energies, pen_energy, u, phi, scn, variant=DEFAULT_VARIANT) -> CostBreakdown:
    """Second half of :func:`cost`, from energy cost and route timings onward."""
    gamma, l, n = _drone_part(u, lam, phi, scn, variant)
    c, l, pen_limit = apply_limits(lam + gamma, l, scn)
    return CostBreakdown(
        energy_cost=float(lam),
        drone_cost=float(gamma),
        total_cost=float(c),
        delivery_time=float(l),
        drone_count=int(n),
        penalized=bool(pen_energy or pen_limit),
        route_energies=tuple(float(e) for e in energies),
    )


def knapsack_values(route_time: float, time_weight_product: float,
                    types: Sequence[BatteryType], model: LinearPowerModel):
    """Usable energy of each battery type and the route's requirement.

    A battery of weight w and energy e leaves ``e - alpha * w * t`` for the
    route after lifting itself; the route needs ``alpha * omega + beta * t``.
    """
    usable = [b.energy - model.alpha * b.weight * route_time for b in types]
    need = model.alpha * time_weight_product + model.beta * route_time
    return usable, need


def discrete_battery_assign(route_time: float, time_weight_product: float,
                            types: Sequence[BatteryType], model: LinearPowerModel):
    """Cheapest set of battery types (each used at most once) covering a route.

    Returns ``(chosen type indices, total cost)``.  Depth-first branch and
    bound over types sorted by cost per usable kJ, pruned with the
    fractional (LP) relaxation.
    """
    if not types:
        raise ValueError("no battery types given")
    usable, need = knapsack_values(route_time, time_weight_product, types, model)
    return min_knapsack([b.cost for b in types], usable, need)


def min_knapsack(costs: Sequence[float], values: Sequence[float], target: float):
    if target <= 0:
        return [], 0.0
    items = [k for k in range(len(costs)) if values[k] > 0]
    if sum(values[k] for k in items) < target:
        raise InfeasibleBatteryError(
            f"batteries supply at most {sum(values[k] for k in items):.6g} kJ, route needs {target:.6g}"
        )
    items.sort(key=lambda k: costs[k] / values[k])
    cs = [costs[k] for k in items]
    vs = [values[k] for k in items]
    m = len(items)

    def relaxation(level, remaining):
        # cheapest fractional cover of `remaining` from items[level:]
        total = 0.0
        for k in range(level, m):
            if vs[k] >= remaining:
                return total + cs[k] * remaining / vs[k]
            total += cs[k]
            remaining -= vs[k]
        return math.inf

    best_cost = sum(cs)
    best = list(range(m))
    chosen: list[int] = []

    def dfs(level, cost_so_far, remaining):
        nonlocal best_cost, best
        if remaining <= 0:
            if cost_so_far < best_cost:
                best_cost, best = cost_so_far, chosen.copy()
            return
        if level == m or cost_so_far + relaxation(level, remaining) >= best_cost:
            return
        chosen.append(level)
        dfs(level + 1, cost_so_far + cs[level], remaining - vs[level])
        chosen.pop()
        dfs(level + 1, cost_so_far, remaining)

    dfs(0, 0.0, target)
    picked = sorted(items[k] for k in best)
    return picked, float(sum(costs[k] for k in picked))


def route_accumulators(route: Sequence[int], scn: Scenario) -> tuple[float, float, float]:
    """(route time, time-weight product, payload) of one route, depot excluded."""
    t = omega = y = 0.0
    p = scn.params
    d, dem = scn.distance_rows, scn.demand_list
    stops = [0, *route, 0]
    for k in range(len(stops) - 2, -1, -1):
        i, j = stops[k + 1], stops[k]
        tij = p.service_time + d[i][j] / p.speed
        t += tij
        omega += y * tij
        y += dem[j]
    return t, omega, y

