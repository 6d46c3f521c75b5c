"""Lumped model: trajectories, tipping line and terminal biomass.

    python demos/lumped_phase.py
"""

import numpy as np

from firesim.lumped import integrate_lumped, terminal_biomass_map, tipping_line
from firesim.params import default_parameters

params = default_parameters()

print("trajectories from T0 = 470 K")
for Y0 in (0.2, 0.6, 1.0):
    traj = integrate_lumped((470.0, Y0), 150.0, 0.01, "rk2", params)
    i = int(np.argmax(traj.T))
    print(f"  Y0={Y0:.1f}: peak T {traj.T[i]:7.1f} K at t={traj.t[i]:5.1f} s, "
          f"Y at peak {traj.Y[i]:.3f} (tipping line {tipping_line(traj.T[i], params):.3f}), "
          f"terminal Y {traj.Y[-1]:.3f}")

print("\nterminal biomass Y* over initial states")
T0s, Y0s, Ystar = terminal_biomass_map((380.0, 520.0), (0.2, 1.0), (8, 5), params)
print("  T0 \\ Y0 " + " ".join(f"{y:6.2f}" for y in Y0s))
for T0, row in zip(T0s, Ystar):
    print(f"  {T0:7.1f} " + " ".join(f"{y:6.3f}" for y in row))
