#!/usr/bin/env python3
"""A small Stiefel benchmark through the experiment runner.

Runs all three methods on St(16, 3) endpoints 0.8pi apart and prints the
CSV files the runner writes; these are the inputs the plots/ tool reads.
The same flow at published scale: `geo-schwarz preset fig4` (or fig4-desk).
"""

import tempfile
from pathlib import Path

import numpy as np

from geoschwarz import ExperimentConfig, Stiefel, run_experiment

cfg = ExperimentConfig(
    experiment_id="demo_st16",
    manifold=Stiefel(16, 3),
    m=4,
    distance=0.8 * np.pi,
    methods=("leapfrog_gs", "global_shooting", "newton_schwarz"),
    seed=0,
)

out = Path(tempfile.mkdtemp(prefix="geoschwarz_demo_"))
paths = run_experiment(cfg, out_dir=out)

for path in paths:
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    last = lines[-1].split(",")
    status = last[header.index("status")]
    iters = last[header.index("iter")]
    res = last[header.index("residual_inf")] or last[header.index("residual_2")]
    print(f"{path.name}")
    print(f"    status={status}  iterations={iters}  final residual={float(res):.2e}")

print(f"\nCSV files left in {out}")
print("render them with the plotting tool, e.g.:")
print(f"  node plots/dist/cli.js --in '{out}/demo_st16__*.csv' "
      "--y residual_2 --group method --out demo.png")
