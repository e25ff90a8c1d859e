"""The hypocycloid straight-line drawer.

A rigid triangle whose three vertices slide on three concurrent lines moves
like a point set fixed to a circle of radius R/2 rolling inside a circle of
radius R: every vertex runs back and forth along a diameter.

Run:  python demos/straight_line_drawer.py [out_dir]
"""

import sys
from pathlib import Path

import numpy as np

from trilinea import circumcircle_check, feasibility, observed_range, rolling_equivalence, rolling_model, trace
from trilinea.scenes import concurrent_scene
from trilinea.svg import render_svg

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out.mkdir(exist_ok=True)

# lines at 10, 75 and 140 degrees through (1, -0.5); edge lengths are
# chords R sin(angle) of the fixed circle of radius R = 2
lines, tri = concurrent_scene((10, 75, 140), R=2.0, meet=(1.0, -0.5), slide=(0.4, -1.0, 0.3))
report = feasibility(lines, tri)
print("verdict:", report.verdict.value, " ratios:", np.round(report.ratios, 12))

tr = trace(lines, tri, n_samples=4096)
print("max edge residual:", tr.edge_residuals().max())
print("max line residual:", tr.line_residuals().max())
for k in range(3):
    rng_k = observed_range(tr, k)
    print(f"vertex {k + 1}: slides over [{rng_k.low:+.6f}, {rng_k.high:+.6f}]  (length {rng_k.length:.9f})")

check = circumcircle_check(tr)
model = rolling_model(lines, tri)
print(f"circumradius {check.radius:.12f} (R/2 = {model.R / 2:.12f}), spread {check.max_dev:.1e}")
print("rolling-circle discrepancy:", rolling_equivalence(lines, tri))

(out / "drawer.svg").write_text(render_svg(tr, rolling=True))
print("wrote", out / "drawer.svg")
