"""How much flying several routes per drone saves as the deadline loosens.

Writes reuse_tradeoff.csv in the working directory.
"""
import csv
from dataclasses import replace

from dronevrp import ExperimentConfig, SaConfig, percent_improvement, sweep

limits = [600.0, 1200.0, 2400.0, 3600.0]
base = ExperimentConfig(n_locations=30, instances=3, runs=2, sa=SaConfig(cooling_factor=0.9))
shared = sweep(base, "time_limit", limits)
single = sweep(replace(base, reuse_disabled=True), "time_limit", limits)

with open("reuse_tradeoff.csv", "w", newline="") as fh:
    w = csv.writer(fh)
    w.writerow(["time_limit", "cost_reuse", "cost_no_reuse", "percent_improvement"])
    for a, b in zip(shared, single):
        gain = percent_improvement(b["avg_min"], a["avg_min"])
        w.writerow([a["value"], round(a["avg_min"], 2), round(b["avg_min"], 2), round(gain, 1)])
        print(f"T = {a['value'] / 60:4.0f} min: ${a['avg_min']:9.2f} vs ${b['avg_min']:9.2f}  (improvement {gain:.1f}%)")
