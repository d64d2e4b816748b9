"""Hover power of a multirotor as a function of carried weight.

The exact model treats each of the ``n`` rotors as an ideal actuator disc
sharing the total mass equally.  Routing needs something linear in the
carried weight, so :func:`fit_linear` least-squares fits ``alpha * m + beta``
to the exact curve on a uniform grid.

All powers here are in watts.  The route-cost code works in kW and kJ; use
:meth:`LinearPowerModel.to_kw` when crossing over.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_GRAVITY = 9.81


@dataclass(frozen=True)
class FrameSpec:
    """Physical description of a multirotor airframe."""

    rotor_count: int
    fluid_density: float  # kg/m^3
    rotor_disc_area: float  # m^2, per rotor
    frame_weight: float  # kg
    gravity: float = DEFAULT_GRAVITY  # m/s^2

    def __post_init__(self):
        if self.rotor_count < 1:
            raise ValueError(f"rotor_count must be >= 1, got {self.rotor_count}")
        if not self.fluid_density > 0:
            raise ValueError("fluid_density must be positive")
        if not self.rotor_disc_area > 0:
            raise ValueError("rotor_disc_area must be positive")
        if not self.frame_weight >= 0:
            raise ValueError("frame_weight must be non-negative")
        if not self.gravity > 0:
            raise ValueError("gravity must be positive")


HEXA_B = FrameSpec(rotor_count=6, fluid_density=1.204, rotor_disc_area=0.2, frame_weight=1.5)


@dataclass(frozen=True)
class LinearPowerModel:
    """``P(m) = alpha * m + beta``.

    Units are whatever the caller picked (W/kg and W from :func:`fit_linear`,
    kW/kg and kW inside scenarios).  ``beta`` is allowed to be non-positive
    because a fit over a wide weight range can put the intercept below zero;
    scenario parameters reject that separately.
    """

    alpha: float
    beta: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not math.isfinite(self.beta):
            raise ValueError("beta must be finite")

    def __call__(self, carried_weight):
        return power_linear(carried_weight, self)

    def to_kw(self) -> "LinearPowerModel":
        """Convert a W/kg, W model to kW/kg, kW."""
        return LinearPowerModel(self.alpha / 1000.0, self.beta / 1000.0)


@dataclass(frozen=True)
class FitReport:
    mean_percent_error: float
    max_abs_difference: float  # W
    fit_range: tuple[float, float]
    step: float
    samples: int


def power_single_rotor(thrust: float, frame: FrameSpec) -> float:
    """Ideal hover power in W of one rotor producing ``thrust`` newtons."""
    if thrust < 0:
        raise ValueError(f"thrust must be non-negative, got {thrust}")
    return thrust**1.5 / math.sqrt(2.0 * frame.fluid_density * frame.rotor_disc_area)


def power_exact(carried_weight, frame: FrameSpec):
    """Hover power in W of the whole airframe carrying ``carried_weight`` kg.

    Accepts scalars or arrays.
    """
    m = np.asarray(carried_weight, dtype=float)
    if np.any(m < 0):
        raise ValueError("carried weight must be non-negative")
    coef = math.sqrt(
        frame.gravity**3 / (2.0 * frame.fluid_density * frame.rotor_disc_area * frame.rotor_count)
    )
    p = (frame.frame_weight + m) ** 1.5 * coef
    return float(p) if p.ndim == 0 else p


def power_linear(carried_weight, model: LinearPowerModel):
    if np.ndim(carried_weight) == 0:
        return model.alpha * float(carried_weight) + model.beta
    return model.alpha * np.asarray(carried_weight, dtype=float) + model.beta


def fit_linear(
    frame: FrameSpec, fit_range: tuple[float, float] = (0.0, 3.0), step: float = 0.001
) -> tuple[LinearPowerModel, FitReport]:
    """Ordinary least-squares line through :func:`power_exact` on a grid.

    The grid runs from ``fit_range[0]`` to ``fit_range[1]`` inclusive in
    increments of ``step``.
    """
    lo, hi = map(float, fit_range)
    if not step > 0:
        raise ValueError("step must be positive")
    if hi < lo:
        raise ValueError(f"empty fit range {fit_range}")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    if count < 2:
        raise ValueError("fit needs at least two samples")
    m = lo + step * np.arange(count)
    p = power_exact(m, frame)

    design = np.column_stack([m, np.ones_like(m)])
    (alpha, beta), *_ = np.linalg.lstsq(design, p, rcond=None)
    model = LinearPowerModel(float(alpha), float(beta))

    resid = model(m) - p
    report = FitReport(
        mean_percent_error=float(np.mean(np.abs(resid) / p) * 100.0),
        max_abs_difference=float(np.max(np.abs(resid))),
        fit_range=(lo, hi),
        step=float(step),
        samples=count,
    )
    return model, report
