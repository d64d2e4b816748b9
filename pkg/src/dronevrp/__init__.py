"""Route planning for multi-trip drone delivery fleets.

Energy model, cost function and simulated annealing solver, exact
enumeration for tiny instances, a MILP builder/validator, and an
experiment harness.
"""
from .energy_model import (
    HEXA_B,
    FitReport,
    FrameSpec,
    LinearPowerModel,
    fit_linear,
    power_exact,
    power_linear,
    power_single_rotor,
)
from .exact_oracle import enumerate_optimal, knapsack_exhaustive, min_makespan
from .harness import ExperimentConfig, ResultRow, percent_improvement, run_experiment, sweep
from .milp_model import build_model, export_lp, string_to_assignment, validate_assignment
from .route_cost import (
    MIN_COST,
    MIN_TIME,
    CostBreakdown,
    CostVariant,
    battery_energy,
    cost,
    discrete_battery_assign,
    energy_cost,
    list_schedule,
    route_times,
    schedule_routes,
    split_routes,
)
from .sa_solver import SaConfig, simulated_annealing
from .scenario import BatteryType, Params, Scenario, generate_random, load, save

__version__ = "0.1.0"
