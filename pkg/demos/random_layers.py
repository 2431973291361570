#!/usr/bin/env python3
# How random nonlinear layers change the quadratic separability measure,
# and where the curvature ratio of each activation exceeds the switching
# threshold.
#
#   PYTHONPATH=src python3 demos/random_layers.py

import numpy as np

from sepscope import (
    BinaryTask,
    depth_study,
    exact_weight,
    f_sigma,
    ls2_at,
    width_study,
)

rng = np.random.default_rng(90)

# a task that overlaps: plenty of room for improvement
task = BinaryTask(
    rng.normal(0.0, 1.0, (60, 8)),
    rng.normal((1.0,) + (0.0,) * 7, 1.0, (60, 8)),
)
print("ls2 of the raw task:", round(ls2_at(task, exact_weight(task)), 2))

# fraction of random sigmoid layers that increase ls2, per width
print("\nwidth study (50 trials per width):")
for row in width_study(task, [4, 16, 64, 256], trials=50, seed=42):
    print(f"  width={row.size:4d}  fraction={row.fraction:.2f}  "
          f"ci=({row.ci_low:.2f}, {row.ci_high:.2f})  mean ls2={row.mean_ls2:.1f}")

# stacking layers of a fixed width
print("\ndepth study (width 32, 50 trials per depth):")
for row in depth_study(task, [1, 2, 4], width=32, trials=50, seed=42):
    print(f"  depth={row.size}  fraction={row.fraction:.2f}  "
          f"mean ls2={row.mean_ls2:.1f}")

# the curvature ratio that governs single-point side switches: scan the
# plane and show where it crosses the threshold of 2
print("\ncurvature ratio above 2 (sigmoid), coarse map (x right, y down):")
xs = np.linspace(-8.0, 8.0, 33)
for y in xs[::4]:
    cells = []
    for x in xs[::2]:
        if abs(x - y) < 1e-9:
            cells.append(".")
            continue
        value = f_sigma("sigmoid", float(x), float(y))
        cells.append("#" if value > 2.0 else ".")
    print("  " + "".join(cells))
