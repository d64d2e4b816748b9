"""Command-line entry point: ``dronevrp <command> ...`` (or ``python -m dronevrp``)."""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import scenario as scenario_io
from .exact_oracle import InstanceTooLargeError, enumerate_optimal
from .harness import (
    SWEEP_FIELDS,
    SWEEP_PARAMETERS,
    ExperimentConfig,
    mode_fixed_battery,
    mode_reuse_disabled,
    run_experiment,
    run_seed,
    sweep,
)
from .milp_model import (
    ConversionError,
    MissingValueError,
    build_model,
    export_lp,
    string_to_assignment,
    validate_assignment,
)
from .route_cost import (
    DEFAULT_VARIANT,
    MIN_COST,
    MIN_TIME,
    CostBreakdown,
    InfeasibleBatteryError,
    InvalidSolutionError,
    cost,
    route_times,
    schedule_routes,
)
from .sa_solver import SaConfig, simulated_annealing
from .scenario import Params, ScenarioFormatError

OBJECTIVES = {"cost": MIN_COST, "time": MIN_TIME}
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3


def _objective(name: str) -> int:
    return OBJECTIVES[name]


def _add_limits(p: argparse.ArgumentParser) -> None:
    p.add_argument("--budget", type=float, help="budget in $ (default: unlimited)")
    p.add_argument("--time-limit", type=float, help="delivery time limit in s (default: unlimited)")
    p.add_argument("--max-drones", type=int, help="largest fleet that may be bought")


def _add_sa(p: argparse.ArgumentParser) -> None:
    p.add_argument("--t0", type=float, default=1.0, help="initial temperature")
    p.add_argument("--tf", type=float, default=0.001, help="final temperature")
    p.add_argument("--mu", type=float, default=0.99, help="cooling factor")
    p.add_argument("--rounds", type=int, default=1000, help="rounds per cooling phase")


def _add_modes(p: argparse.ArgumentParser) -> None:
    p.add_argument("--no-reuse", action="store_true", help="give every route its own drone")
    p.add_argument("--battery-weight", type=float, help="fix every route's battery to this many kg")


def _limits(args) -> dict:
    out = {}
    for flag, name in (("budget", "budget"), ("time_limit", "time_limit"), ("max_drones", "max_drones")):
        value = getattr(args, flag, None)
        if value is not None:
            out[name] = value
    return out


def _variant(args):
    if args.battery_weight is not None:
        return mode_fixed_battery(args.battery_weight, reuse=not args.no_reuse)
    return mode_reuse_disabled() if args.no_reuse else DEFAULT_VARIANT


def _load(path, args=None):
    scn = scenario_io.load(path)
    changes = _limits(args) if args is not None else {}
    return scn.with_params(**changes) if changes else scn


def _parse_solution(text: str) -> np.ndarray:
    path = Path(text)
    if path.is_file():
        text = path.read_text()
    tokens = text.replace(",", " ").replace("[", " ").replace("]", " ").split()
    try:
        return np.array([int(t) for t in tokens], dtype=np.int64)
    except ValueError as exc:
        raise InvalidSolutionError(f"cannot read solution string: {exc}") from exc


def _print_breakdown(bd: CostBreakdown, out) -> None:
    print(f"total cost      ${bd.total_cost:.2f}", file=out)
    print(f"  energy        ${bd.energy_cost:.2f}", file=out)
    print(f"  drones        ${bd.drone_cost:.2f} ({bd.drone_count} drones)", file=out)
    print(f"delivery time   {bd.delivery_time:.1f} s", file=out)
    print(f"routes          {len(bd.route_energies)}", file=out)
    print(f"penalized       {'yes' if bd.penalized else 'no'}", file=out)


def cmd_generate(args, out) -> int:
    params = Params(**_limits(args))
    seeds = np.random.SeedSequence(args.seed).spawn(args.count) if args.count > 1 else [args.seed]
    for k, seed in enumerate(seeds):
        scn = scenario_io.generate_random(args.locations, args.area, tuple(args.demand_range),
                                          seed=seed, params=params)
        if args.count == 1:
            path = Path(args.output)
        else:
            Path(args.output).mkdir(parents=True, exist_ok=True)
            path = Path(args.output) / f"instance_{k:03d}.json"
        scenario_io.save(scn, path)
        print(path, file=out)
        if args.distances:
            scenario_io.save_distance_csv(scn, path.with_suffix(".distances.csv"))
    return 0


def cmd_solve(args, out) -> int:
    scn = _load(args.scenario, args)
    phi = _objective(args.objective)
    variant = _variant(args)
    rows, best = [], None
    for r in range(args.runs):
        cfg = SaConfig(args.t0, args.tf, args.mu, args.rounds, phi, run_seed(args.seed, 0, r))
        s, bd, trace = simulated_annealing(scn, cfg, variant)
        if args.trace and r == 0:
            trace.to_csv(args.trace)
        rows.append((r, s, bd))
        if best is None or bd.objective(phi) < best[2].objective(phi):
            best = (r, s, bd)
    _, s, bd = best
    print("solution        " + " ".join(map(str, s.tolist())), file=out)
    _print_breakdown(bd, out)
    if args.runs > 1:
        objs = np.array([b.objective(phi) for _, _, b in rows])
        print(f"runs            {args.runs}: min {objs.min():.6g}, mean {objs.mean():.6g}, "
              f"std {objs.std():.6g}", file=out)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(("run",) + CostBreakdown.CSV_FIELDS + ("solution",))
            for r, s_r, b in rows:
                row = b.as_row()
                w.writerow([r] + [row[k] for k in CostBreakdown.CSV_FIELDS]
                           + [" ".join(map(str, s_r.tolist()))])
    return EXIT_INFEASIBLE if bd.penalized else 0


def _experiment_config(args, **extra) -> ExperimentConfig:
    return ExperimentConfig(
        n_locations=args.locations, area=args.area, demand_range=tuple(args.demand_range),
        instances=args.instances, runs=args.runs,
        sa=SaConfig(args.t0, args.tf, args.mu, args.rounds),
        objective=_objective(args.objective), params=Params(**_limits(args)),
        reuse_disabled=args.no_reuse, fixed_battery_weight=args.battery_weight,
        master_seed=args.seed, workers=args.workers, **extra,
    )


def cmd_experiment(args, out) -> int:
    res = run_experiment(_experiment_config(args, output=args.output))
    print(f"average min {res.avg_min:.6g}, mean {res.avg_mean:.6g}, std {res.avg_std:.6g}, "
          f"runtime {res.avg_runtime:.3g} s/run", file=out)
    return 0


def cmd_sweep(args, out) -> int:
    cfg = _experiment_config(args)
    rows = sweep(cfg, args.parameter, args.values, path=args.output)
    print(",".join(SWEEP_FIELDS), file=out)
    for row in rows:
        print(",".join([repr(row["value"])] + [f"{row[k]:.6g}" for k in SWEEP_FIELDS[1:]]), file=out)
    return 0


def cmd_oracle(args, out) -> int:
    phi = _objective(args.objective)
    results = []
    for k, path in enumerate(args.scenarios):
        scn = _load(path, args)
        obj, s, bd = enumerate_optimal(scn, phi)
        results.append((k, path, obj, s, bd))
        print(f"{path}: optimum {obj:.6f}  {' '.join(map(str, s.tolist()))}"
              + ("  (penalized)" if bd.penalized else ""), file=out)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["instance", "scenario", "optimum", "penalized", "solution"])
            for k, path, obj, s, bd in results:
                w.writerow([k, path, repr(obj), int(bd.penalized), " ".join(map(str, s.tolist()))])
    return EXIT_INFEASIBLE if any(r[4].penalized for r in results) else 0


def cmd_export_lp(args, out) -> int:
    scn = _load(args.scenario, args)
    types = scn.battery_types if args.battery_types else None
    if args.battery_types and not types:
        raise ScenarioFormatError(f"{args.scenario}: no battery types defined")
    model = build_model(scn, _objective(args.objective), types)
    export_lp(model, args.output)
    print(f"{args.output}: {len(model.variables)} variables, {len(model.rows)} rows", file=out)
    return 0


def cmd_validate(args, out) -> int:
    scn = _load(args.scenario, args)
    phi = _objective(args.objective)
    s = _parse_solution(args.solution)
    bd = cost(s, phi, scn)
    types = scn.battery_types if args.battery_types else None
    model = build_model(scn, phi, types)
    asn = string_to_assignment(s, schedule_routes(route_times(s, scn), bd.drone_count), scn, types)
    violations = validate_assignment(model, asn, args.tol)
    for v in violations:
        print(v, file=out)
    objective = asn[model.objective]
    print(f"objective {model.objective} = {objective:.6f} "
          f"(cost function: {bd.objective(phi):.6f}); {len(violations)} violations", file=out)
    return 1 if violations else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dronevrp", description="Multi-trip drone delivery planning.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write random scenario files")
    p.add_argument("-n", "--locations", type=int, default=6)
    p.add_argument("-a", "--area", type=float, default=0.25, help="square area in km^2")
    p.add_argument("--demand-range", type=float, nargs=2, default=(0.5, 2.0), metavar=("LO", "HI"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1, help="number of instances; >1 writes a directory")
    p.add_argument("--distances", action="store_true", help="also write each distance matrix as CSV")
    p.add_argument("-o", "--output", required=True)
    _add_limits(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="anneal one scenario")
    p.add_argument("scenario")
    p.add_argument("--objective", choices=OBJECTIVES, default="cost")
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", help="CSV with one row per run")
    p.add_argument("--trace", help="CSV of the first run's cooling phases")
    _add_sa(p)
    _add_limits(p)
    _add_modes(p)
    p.set_defaults(func=cmd_solve)

    def experiment_flags(p):
        p.add_argument("-n", "--locations", type=int, default=6)
        p.add_argument("-a", "--area", type=float, default=0.25)
        p.add_argument("--demand-range", type=float, nargs=2, default=(0.5, 2.0), metavar=("LO", "HI"))
        p.add_argument("--instances", type=int, default=50)
        p.add_argument("--runs", type=int, default=20)
        p.add_argument("--objective", choices=OBJECTIVES, default="cost")
        p.add_argument("--seed", type=int, default=0, help="master seed")
        p.add_argument("--workers", type=int, default=1)
        _add_sa(p)
        _add_limits(p)
        _add_modes(p)

    p = sub.add_parser("experiment", help="repeated annealing on random instances")
    experiment_flags(p)
    p.add_argument("-o", "--output", help="per-instance CSV")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("sweep", help="experiment at each value of one parameter")
    experiment_flags(p)
    p.add_argument("--parameter", choices=SWEEP_PARAMETERS, required=True)
    p.add_argument("--values", type=float, nargs="+", required=True)
    p.add_argument("-o", "--output", help="sweep CSV")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", help="exact optimum of tiny scenarios by enumeration")
    p.add_argument("scenarios", nargs="+")
    p.add_argument("--objective", choices=OBJECTIVES, default="cost")
    p.add_argument("-o", "--output", help="CSV of optima")
    _add_limits(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("export-lp", help="write the MILP in CPLEX LP format")
    p.add_argument("scenario")
    p.add_argument("--objective", choices=OBJECTIVES, default="cost")
    p.add_argument("--battery-types", action="store_true", help="use the scenario's battery types")
    p.add_argument("-o", "--output", required=True)
    _add_limits(p)
    p.set_defaults(func=cmd_export_lp)

    p = sub.add_parser("validate", help="check a solution string against the MILP rows")
    p.add_argument("scenario")
    p.add_argument("solution", help="solution string like '0 1 2 0 3 0', or a file holding one")
    p.add_argument("--objective", choices=OBJECTIVES, default="cost")
    p.add_argument("--battery-types", action="store_true")
    p.add_argument("--tol", type=float, default=1e-6)
    _add_limits(p)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (ScenarioFormatError, InvalidSolutionError, MissingValueError, InstanceTooLargeError,
            FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (InfeasibleBatteryError, ConversionError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
