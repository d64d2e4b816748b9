import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dronevrp.exact_oracle import (
    InstanceTooLargeError,
    enumerate_optimal,
    knapsack_exhaustive,
    min_makespan,
    ordered_route_sets,
)
from dronevrp.route_cost import MIN_COST, MIN_TIME, InfeasibleBatteryError, cost, list_schedule
from dronevrp.scenario import BatteryType, Params, Scenario, generate_random


def test_single_location(one_stop):
    obj, s, bd = enumerate_optimal(one_stop, MIN_COST)
    assert s.tolist() == [0, 1, 0]
    assert obj == cost([0, 1, 0], MIN_COST, one_stop).total_cost == bd.total_cost


@pytest.mark.parametrize("phi", [MIN_COST, MIN_TIME])
def test_two_locations(phi):
    scn = generate_random(2, 0.25, seed=4, params=Params(budget=2000.0, time_limit=900.0))
    candidates = [[0, 1, 2, 0], [0, 2, 1, 0], [0, 1, 0, 2, 0], [0, 2, 0, 1, 0]]
    expected = min(cost(s, phi, scn).objective(phi) for s in candidates)
    obj, s, _ = enumerate_optimal(scn, phi)
    assert obj == expected
    assert s.tolist() in candidates


def test_route_set_counts():
    assert sum(1 for _ in ordered_route_sets(range(1, 4))) == 6 * 4
    assert sum(1 for _ in ordered_route_sets(range(1, 7))) == 720 * 32


@pytest.mark.parametrize("seed", range(3))
@pytest.mark.parametrize("phi, params", [(MIN_COST, Params(time_limit=400.0)),
                                         (MIN_TIME, Params(budget=1100.0))])
def test_matches_brute_force_over_strings(seed, phi, params):
    # every distinct strict string of a 3-location instance, scored by cost()
    scn = generate_random(3, 0.25, seed=seed, params=params)
    best = None
    for perm in set(itertools.permutations([1, 2, 3, 0, 0])):
        bd = cost([0, *perm, 0], phi, scn)
        key = (bd.penalized, bd.objective(phi))
        best = key if best is None or key < best else best
    obj, _, bd = enumerate_optimal(scn, phi)
    assert (bd.penalized, obj) == best


def test_unpenalised_beats_penalised():
    # one parcel is too heavy to share a route; a cheap joint route is penalised
    scn = Scenario(np.array([[0.0, 0.0], [30.0, 0.0], [0.0, 30.0]]), np.array([2.0, 0.9]))
    _, s, bd = enumerate_optimal(scn, MIN_COST)
    assert not bd.penalized
    assert cost([0, 1, 2, 0], MIN_COST, scn).penalized
    assert len([k for k in s if k == 0]) == 3


def test_size_guard():
    with pytest.raises(InstanceTooLargeError):
        enumerate_optimal(generate_random(10, 0.25, seed=0), MIN_COST)


def test_makespan_examples():
    u = [(4.0, 5.0), (3.0, 4.0), (2.0, 3.0)]
    assert min_makespan(u, 2) == 6.0
    assert min_makespan(u, 3) == 4.0
    assert min_makespan(u, 4) == 4.0
    assert min_makespan([], 2) == 0.0
    with pytest.raises(InstanceTooLargeError):
        min_makespan([(1.0, 2.0)] * 11, 2)
    with pytest.raises(InstanceTooLargeError):
        min_makespan(u, 5)


def _timings():
    pair = st.tuples(st.floats(1.0, 100.0), st.floats(0.0, 1.0)).map(lambda t: (t[0], t[0] * (1 + t[1])))
    return st.lists(pair, min_size=1, max_size=7)


@given(_timings(), st.integers(1, 4))
def test_makespan_bounds_list_schedule(u, n):
    opt = min_makespan(u, n)
    greedy = list_schedule(u, n)
    assert opt <= greedy + 1e-9
    assert greedy <= 2 * opt + 1e-9


def test_knapsack_exhaustive_basics():
    types = [BatteryType(0.2, 100.0, 3.0), BatteryType(0.3, 200.0, 5.0)]
    assert knapsack_exhaustive(types, [90.0, 180.0], 0.0) == ([], 0.0)
    assert knapsack_exhaustive(types[:1], [90.0], 50.0) == ([0], 3.0)
    assert knapsack_exhaustive(types, [90.0, 180.0], 100.0) == ([1], 5.0)
    assert knapsack_exhaustive(types, [90.0, 180.0], 200.0) == ([0, 1], 8.0)
    with pytest.raises(InfeasibleBatteryError):
        knapsack_exhaustive(types, [90.0, 180.0], 300.0)
    with pytest.raises(InstanceTooLargeError):
        knapsack_exhaustive(types * 11, [1.0] * 22, 1.0)
