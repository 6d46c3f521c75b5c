"""Travelling-wave speeds against the closed-form estimates.

    python demos/wave_speeds.py [cells]
"""

import sys

from firesim.analysis import linearised_speed, measure_wave_speed, speed_bounds
from firesim.params import case_table
from firesim.runner import simulate_scenario

cells = int(sys.argv[1]) if len(sys.argv) > 1 else 500
window = (200.0, 800.0)

print(f"cooling sweep (suite A), N={cells}")
for entry in case_table("A"):
    r = simulate_scenario(f"case{entry.identifier}", cells=cells)
    est = measure_wave_speed(r.track.envelope(), window)["right"]
    c_lin = linearised_speed(1.0, r.params)
    lin = "none" if c_lin is None else f"{c_lin:.4f}"
    print(f"  h={entry.value:6.3f}: measured {est.speed:.4f} m/s (R2 {est.r2:.5f}), linearised {lin}")

c_star, c_sup = speed_bounds(r.params)
print(f"bounds without cooling: {c_star:.4f} <= c <= {c_sup:.4f} m/s")
