"""Wind sweep: the upwind front slows and dies, the downwind front speeds up.

    python demos/wind_transition.py [cells]
"""

import sys

from firesim.analysis import front_extinct, measure_wave_speed
from firesim.params import case_table
from firesim.runner import simulate_scenario

cells = int(sys.argv[1]) if len(sys.argv) > 1 else 1000

for entry in case_table("C"):
    r = simulate_scenario(f"case{entry.identifier}", cells=cells)
    env = r.track.envelope()
    est = measure_wave_speed(env, (200.0, 800.0))
    left = "extinct" if front_extinct(env, "left") else f"{est['left'].speed:.4f}"
    print(f"v={entry.value:5.3f}: downwind {est['right'].speed:.4f} m/s, upwind {left}")
