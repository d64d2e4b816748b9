"""Plan one small delivery day: anneal, check against the exact optimum, print the schedule.

    python3 demos/plan_deliveries.py [seed]
"""
import sys

from dronevrp import (
    MIN_COST,
    Params,
    SaConfig,
    enumerate_optimal,
    generate_random,
    route_times,
    schedule_routes,
    simulated_annealing,
    split_routes,
)

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 1
scn = generate_random(6, 0.25, seed=seed, params=Params(time_limit=600.0))

s, bd, trace = simulated_annealing(scn, SaConfig(cooling_factor=0.95, seed=seed))
best, s_opt, _ = enumerate_optimal(scn, MIN_COST)
print(f"annealed cost ${bd.total_cost:.2f} with {bd.drone_count} drones, exact optimum ${best:.2f}")
print(f"{len(trace.temperature)} cooling phases, {int(trace.accepted.sum())} accepted moves\n")

u = route_times(s, scn)
for route, (drone, start), (arrive, back), e in zip(split_routes(s), schedule_routes(u, bd.drone_count),
                                                   u, bd.route_energies):
    stops = " -> ".join(map(str, route))
    print(f"drone {drone}: leaves {start:6.1f} s, route 0 -> {stops} -> 0, last drop {start + arrive:6.1f} s, "
          f"home {start + back:6.1f} s, battery {e / scn.params.energy_density:.3f} kg")
print(f"\nlast delivery at {bd.delivery_time:.1f} s (limit {scn.params.time_limit:.0f} s)")
