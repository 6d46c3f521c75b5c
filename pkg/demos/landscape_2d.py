"""2D fire through a multi-scale random biomass landscape.

Writes snapshots to an output directory, then summarises the burn scar.

    python demos/landscape_2d.py [cells] [out_dir]
"""

import sys

import numpy as np

from firesim.io import read_snapshot, read_snapshot_index
from firesim.runner import run_to_directory

cells = sys.argv[1] if len(sys.argv) > 1 else "125"
out_dir = sys.argv[2] if len(sys.argv) > 2 else "landscape-run"

out = run_to_directory("heterogeneous-2d", out_dir, overrides=[f"nx={cells}", f"ny={cells}"])
index = read_snapshot_index(out.directory / "snapshots" / "index.csv")
_, first = read_snapshot(index[min(index)])
for t, path in index.items():
    _, fields = read_snapshot(path)
    drop = first["Y"] - fields["Y"]
    print(f"t={t:5.0f} s: max T {fields['T'].max():7.1f} K, burning cells {(fields['T'] > 400).sum():6d}, "
          f"burned area {(drop > 0.05).mean() * 100:5.1f} %")
print(f"outputs in {out.directory}")
