"""Brute-force solvers for checking heuristics on tiny instances."""
from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np

from .route_cost import (
    DEFAULT_VARIANT,
    CostBreakdown,
    CostVariant,
    InfeasibleBatteryError,
    _route_accounting,
    _route_times,
    cost,
    finish_cost,
    join_routes,
    route_accumulators,
)
from .scenario import BatteryType, Scenario

MAX_ENUMERATION = 9
MAX_SCHEDULE_ROUTES = 10
MAX_SCHEDULE_DRONES = 4
MAX_KNAPSACK_TYPES = 20


class InstanceTooLargeError(ValueError):
    pass


def ordered_route_sets(locations: Sequence[int]):
    """Every way to cover ``locations`` with an ordered list of non-empty routes."""
    n = len(locations)
    for perm in itertools.permutations(locations):
        for cuts in itertools.product((False, True), repeat=n - 1):
            routes, start = [], 0
            for k, cut in enumerate(cuts, 1):
                if cut:
                    routes.append(perm[start:k])
                    start = k
            routes.append(perm[start:])
            yield routes


def enumerate_optimal(scn: Scenario, phi: int, variant: CostVariant = DEFAULT_VARIANT):
    """Exact optimum over all solution strings.

    Every split of every visiting order into routes is evaluated, with every
    order of the routes, because the drone schedule depends on it.  Any
    unpenalised solution beats every penalised one.

    Returns ``(objective, canonical string, CostBreakdown)``.
    """
    n = scn.n_locations
    if n > MAX_ENUMERATION:
        raise InstanceTooLargeError(f"{n} locations; enumeration is limited to {MAX_ENUMERATION}")

    memo = {}

    def route_info(route):
        info = memo.get(route)
        if info is None:
            t, omega, y = route_accumulators(route, scn)
            lam, energy, pen = _route_accounting(t, omega, y, scn, variant)
            (timing,) = _route_times([0, *route, 0], scn)
            info = memo[route] = (lam, energy, pen, timing)
        return info

    best_key, best_routes = None, None
    for routes in ordered_route_sets(range(1, n + 1)):
        infos = [route_info(r) for r in routes]
        lam = 0.0
        for info in reversed(infos):
            lam += info[0]
        pen = any(info[2] for info in infos)
        bd = finish_cost(lam, [info[1] for info in infos], pen, [info[3] for info in infos],
                         phi, scn, variant)
        key = (bd.penalized, bd.objective(phi))
        if best_key is None or key < best_key:
            best_key, best_routes = key, routes

    s = join_routes(best_routes)
    bd = cost(s, phi, scn, variant)
    return bd.objective(phi), s, bd


def _set_partitions(n_items: int, max_blocks: int):
    """Restricted growth strings: block label of each item, at most ``max_blocks`` blocks."""
    labels = [0] * n_items

    def rec(k, used):
        if k == n_items:
            yield labels
            return
        for b in range(min(used + 1, max_blocks)):
            labels[k] = b
            yield from rec(k + 1, max(used, b + 1))

    if n_items == 0:
        yield []
        return
    yield from rec(0, 0)


def min_makespan(u, n: int) -> float:
    """Smallest achievable overall delivery time for routes ``u`` on ``n`` drones.

    A drone flying a set of routes back to back finishes its last delivery
    at ``sum(arrival) - max(arrival - delivery)`` if it flies the route with
    the longest return leg last, which is the best order.
    """
    if n < 1:
        raise ValueError("need at least one drone")
    if len(u) > MAX_SCHEDULE_ROUTES or n > MAX_SCHEDULE_DRONES:
        raise InstanceTooLargeError(
            f"min_makespan handles <= {MAX_SCHEDULE_ROUTES} routes and <= {MAX_SCHEDULE_DRONES} drones"
        )
    if not u:
        return 0.0
    best = float("inf")
    for labels in _set_partitions(len(u), n):
        loads = {}
        for (p, q), b in zip(u, labels):
            total, slack = loads.get(b, (0.0, 0.0))
            loads[b] = (total + q, max(slack, q - p))
        span = max(total - slack for total, slack in loads.values())
        best = min(best, span)
    return best


def knapsack_exhaustive(types: Sequence[BatteryType], values: Sequence[float], target: float):
    """Minimum-cost subset with ``sum(values) >= target``, checking all 2^k subsets.

    Returns ``(chosen indices, total cost)``.
    """
    k = len(types)
    if k > MAX_KNAPSACK_TYPES:
        raise InstanceTooLargeError(f"{k} types; exhaustive search is limited to {MAX_KNAPSACK_TYPES}")
    costs = np.array([b.cost for b in types], dtype=float)
    vals = np.array(values, dtype=float)
    bits = np.arange(k)
    best_cost, best_mask = np.inf, None
    chunk = 1 << 14
    for start in range(0, 1 << k, chunk):
        masks = np.arange(start, min(start + chunk, 1 << k))
        member = ((masks[:, None] >> bits) & 1).astype(float)
        c = member @ costs
        ok = member @ vals >= target
        if ok.any():
            idx = np.flatnonzero(ok)[np.argmin(c[ok])]
            if c[idx] < best_cost:
                best_cost, best_mask = c[idx], masks[idx]
    if best_mask is None:
        raise InfeasibleBatteryError("no subset of battery types supplies enough energy")
    chosen = [b for b in range(k) if (best_mask >> b) & 1]
    return chosen, float(sum(costs[b] for b in chosen))
