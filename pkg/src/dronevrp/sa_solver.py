"""Simulated annealing over solution strings.

Each round picks two interior positions and one of three exchange rules
(swap, relocate, 2-opt), then applies the Metropolis test to the change in
objective.  There is no reheating: the temperature falls geometrically from
``initial_temperature`` until it reaches ``final_temperature``.

Two engines run the same Markov chain.  ``"numba"`` (the default) is the
compiled loop; ``"python"`` is a plain loop over :func:`route_cost.cost`,
kept for cross-checking.  Given the same seed both draw the same random
numbers in the same order and return the same string.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .route_cost import DEFAULT_VARIANT, MIN_COST, CostBreakdown, CostVariant, check_solution, cost
from .scenario import Scenario

SWAP, RELOCATE, TWO_OPT = 1, 2, 3
RULES = {"swap": SWAP, "relocate": RELOCATE, "two_opt": TWO_OPT}


@dataclass(frozen=True)
class SaConfig:
    initial_temperature: float = 1.0
    final_temperature: float = 0.001
    cooling_factor: float = 0.99
    rounds_per_phase: int = 1000
    objective: int = MIN_COST
    seed: int | None = None

    def __post_init__(self):
        if not 0 < self.cooling_factor < 1:
            raise ValueError("cooling_factor must lie in (0, 1)")
        if not 0 < self.final_temperature < self.initial_temperature:
            raise ValueError("need 0 < final_temperature < initial_temperature")
        if self.rounds_per_phase < 1:
            raise ValueError("rounds_per_phase must be >= 1")

    @property
    def phases(self) -> int:
        return int(_kernels.count_phases(self.initial_temperature, self.final_temperature,
                                         self.cooling_factor))


@dataclass
class SaTrace:
    """Per cooling phase: temperature, accepted moves, incumbent at phase end
    and best incumbent seen during the phase."""

    temperature: np.ndarray
    accepted: np.ndarray
    objective: np.ndarray
    best: np.ndarray = field(repr=False)

    def __len__(self):
        return self.temperature.size

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["phase", "temperature", "accepted", "objective", "best_objective"])
            for k in range(len(self)):
                w.writerow([k, repr(float(self.temperature[k])), int(self.accepted[k]),
                            repr(float(self.objective[k])), repr(float(self.best[k]))])


def random_solution(n_locations: int, rng) -> np.ndarray:
    """Shuffle the locations together with ``n - 1`` interior depot zeros.

    The result may well be infeasible; annealing sorts that out.
    """
    if n_locations < 1:
        raise ValueError("need at least one location")
    rng = np.random.default_rng(rng)
    body = np.concatenate([np.arange(1, n_locations + 1), np.zeros(n_locations - 1, dtype=np.int64)])
    body = rng.permutation(body)
    return np.concatenate([[0], body, [0]]).astype(np.int64)


def apply_exchange(s, rule, i: int, j: int) -> np.ndarray:
    """Neighbour of ``s`` under an exchange rule.

    swap exchanges positions ``i`` and ``j``; relocate removes the element at
    ``i`` and reinserts it at ``j``; two_opt reverses ``s[min:max + 1]``.
    Neither index may point at the terminal depots.
    """
    s = np.asarray(s, dtype=np.int64)
    rule = RULES.get(rule, rule)
    if rule not in (SWAP, RELOCATE, TWO_OPT):
        raise ValueError(f"unknown exchange rule {rule!r}")
    for k in (i, j):
        if not 1 <= k <= s.size - 2:
            raise IndexError(f"index {k} outside interior 1..{s.size - 2}")
    out = s.copy()
    if rule == SWAP:
        out[i], out[j] = s[j], s[i]
    elif rule == RELOCATE:
        lst = s.tolist()
        lst.insert(j, lst.pop(i))
        out = np.array(lst, dtype=np.int64)
    else:
        lo, hi = min(i, j), max(i, j)
        out[lo:hi + 1] = s[lo:hi + 1][::-1]
    return out


def metropolis_accept(delta: float, temperature: float, x: float) -> bool:
    """``exp(-delta / T) >= x``, without overflowing for improving moves."""
    return delta <= 0.0 or math.exp(-delta / temperature) >= x


def simulated_annealing(scn: Scenario, cfg: SaConfig, variant: CostVariant = DEFAULT_VARIANT,
                        engine: str = "numba"):
    """Run one annealing chain.

    Returns ``(final string, its CostBreakdown, SaTrace)``.
    """
    rng = np.random.default_rng(cfg.seed)
    s0 = random_solution(scn.n_locations, rng)
    if engine == "numba":
        fp, ip = _kernels.pack_params(scn, cfg.objective, variant)
        s, temps, accepts, objs, bests = _kernels.anneal(
            s0, np.ascontiguousarray(scn.distances), np.ascontiguousarray(scn.demand_vector),
            fp, ip, cfg.initial_temperature, cfg.final_temperature, cfg.cooling_factor,
            cfg.rounds_per_phase, rng,
        )
        trace = SaTrace(temps, accepts, objs, bests)
    elif engine == "python":
        s, trace = _anneal_python(s0, scn, cfg, variant, rng)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    check_solution(s, scn.n_locations, strict=True)
    return s, cost(s, cfg.objective, scn, variant), trace


def _anneal_python(s, scn: Scenario, cfg: SaConfig, variant: CostVariant, rng):
    phi = cfg.objective
    L = s.size
    obj = cost(s, phi, scn, variant).objective(phi)
    temps, accepts, objs, bests = [], [], [], []
    temp = cfg.initial_temperature
    while temp > cfg.final_temperature:
        temp = cfg.cooling_factor * temp
        accepted = 0
        best = obj
        for _ in range(cfg.rounds_per_phase):
            i = rng.integers(1, L - 1)
            j = rng.integers(1, L - 1)
            rule = rng.integers(1, 4)
            cand = apply_exchange(s, int(rule), int(i), int(j))
            x = rng.random()
            new = cost(cand, phi, scn, variant).objective(phi)
            if metropolis_accept(new - obj, temp, x):
                s, obj = cand, new
                accepted += 1
            best = min(best, obj)
        temps.append(temp)
        accepts.append(accepted)
        objs.append(obj)
        bests.append(best)
    trace = SaTrace(np.array(temps), np.array(accepts, dtype=np.int64), np.array(objs), np.array(bests))
    return s, trace


def evaluate_fast(s, phi: int, scn: Scenario, variant: CostVariant = DEFAULT_VARIANT):
    """Compiled evaluation; returns the same numbers as :func:`route_cost.cost`
    as a ``(c, l, lambda, gamma, n, penalized)`` tuple."""
    s = check_solution(s, scn.n_locations)
    fp, ip = _kernels.pack_params(scn, phi, variant)
    size = s.size
    return _kernels.evaluate(
        s, np.ascontiguousarray(scn.distances), np.ascontiguousarray(scn.demand_vector), fp, ip,
        np.empty(size), np.empty(size), np.empty(size), np.empty(size, dtype=np.int64),
    )


def best_of_runs(scn: Scenario, cfg: SaConfig, runs: int, variant: CostVariant = DEFAULT_VARIANT):
    """Independent chains seeded ``cfg.seed, cfg.seed + 1, ...``; returns the
    best ``(string, CostBreakdown)`` and the list of all objectives."""
    base = 0 if cfg.seed is None else cfg.seed
    best, objs = None, []
    for r in range(runs):
        run_cfg = SaConfig(cfg.initial_temperature, cfg.final_temperature, cfg.cooling_factor,
                           cfg.rounds_per_phase, cfg.objective, base + r)
        s, bd, _ = simulated_annealing(scn, run_cfg, variant)
        objs.append(bd.objective(cfg.objective))
        if best is None or objs[-1] < best[1].objective(cfg.objective):
            best = (s, bd)
    return best[0], best[1], objs
