"""Lifting the drawer out of the plane.

Lines that do not meet can still carry a moving triangle, provided they all
cross one common perpendicular axis (or, in R^4 and up, lie in parallel
planes). Projecting along the axis gives a planar drawer with shortened
edges, and the lifted motion is the planar motion plus fixed heights.

Run:  python demos/lifted_mechanism.py
"""

import math

import numpy as np

from trilinea import classify_scene, common_perpendicular, feasibility, project_out, trace, TriangleSpec
from trilinea.scenes import lifted_scene, random_rotation

rng = np.random.default_rng(11)
lines, tri = lifted_scene((0, 65, 130), R=1.5, heights=(-0.7, 0.2, 1.1), dim=3,
                          rotation=random_rotation(3, rng), origin=(1.0, 2.0, -1.0))
scene = classify_scene(*lines)
print("scene class:", scene.tag.value)
for i, j in ((0, 1), (0, 2), (1, 2)):
    g = common_perpendicular(lines[i], lines[j])
    print(f"  lines {i + 1}{j + 1}: distance {g.dist:.6f}, angle {math.degrees(g.alpha):.3f} deg")

report = feasibility(lines, tri)
print("verdict:", report.verdict.value)

# squash the axis away and compare with the planar drawer
w = scene.axis.direction
heights = [L.anchor @ w for L in lines]
flat = project_out(lines, w)
flat_tri = TriangleSpec(*(math.sqrt(tri.length(i, j) ** 2 - (heights[i] - heights[j]) ** 2)
                          for i, j in ((0, 1), (0, 2), (1, 2))))
lifted = trace(lines, tri, n_samples=2000).points
planar = trace(flat, flat_tri, n_samples=2000).points
shadow = lifted - (lifted @ w)[..., None] * w
print("shadow vs planar motion, max gap:", np.max(np.abs(shadow - planar)))
print("heights stay fixed:", np.ptp(lifted @ w, axis=0))

# in R^4 the lines may also be offset along a second normal direction
lines4, tri4 = lifted_scene((20, 80, 150), R=1.0, heights=(0.0, 0.5, -0.5), dim=4,
                            normal_offsets=[[0.3], [-0.4], [0.0]])
print("R^4 scene:", classify_scene(*lines4).tag.value, "->", feasibility(lines4, tri4).verdict.value)
