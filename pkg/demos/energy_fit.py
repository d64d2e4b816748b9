"""Compare the exact hover power of a hexacopter with its straight-line fit."""
import numpy as np

from dronevrp.energy_model import HEXA_B, fit_linear, power_exact

for lo, hi in ((0.0, 3.0), (0.0, 10.0)):
    model, report = fit_linear(HEXA_B, (lo, hi), 0.001)
    print(f"fit over [{lo:g}, {hi:g}] kg: P(m) = {model.alpha:.2f} m {'-' if model.beta < 0 else '+'} {abs(model.beta):.2f} W, "
          f"mean error {report.mean_percent_error:.2f}%, worst gap {report.max_abs_difference:.2f} W")

model, _ = fit_linear(HEXA_B)
print("\n  m (kg)   exact (W)   linear (W)")
for m in np.linspace(0.0, 3.0, 7):
    print(f"  {m:6.2f}   {power_exact(m, HEXA_B):9.2f}   {model(m):10.2f}")
