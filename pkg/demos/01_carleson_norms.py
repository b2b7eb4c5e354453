"""
Carleson norms of discrete measures
===================================

A measure on a Jordan domain is stored as weighted atoms.  Its Carleson
norm is the largest ratio mu(D(z, r)) / r over boundary centers z and
radii r; on a finite grid this is a lower bound for the true supremum.
"""

import numpy as np

from carleson.geometry import unit_circle
from carleson.measure import (
    Measure, carleson_norm, cartesian_cells, collar_deficit, default_radii, from_density,
    segment_measure, vanishing_profile, whitney_cells,
)

circle = unit_circle(256)

# %%
# Area measure on the disk.  The exact norm is the maximum of A(r)/r, where
# A(r) is the area of the lens cut from the disk by D(1, r): about 1.620 at r ~ 1.8.

area = from_density(lambda z: np.ones(z.shape), cartesian_cells(512, circle), circle)
rep = carleson_norm(area, radii=default_radii(circle, 64))
print(f"area measure: norm {rep.norm:.4f} at r = {rep.witness[1]:.3f}")

# %%
# A single atom of mass 1 at the origin: the first disk reaching it has r = 1.

print("unit atom:", carleson_norm(Measure([0j], [1.0], circle)).norm)

# %%
# Vanishing profiles.  Arc length on a radius is Carleson but not vanishing:
# small disks at z = 1 always catch mass ~ r.  The weight (1 - |z|^2)^(-1/2)
# is vanishing with profile ~ sqrt(r).

circ = unit_circle(512)
seg = segment_measure(circ, 4096)
power = from_density(lambda z: (1 - np.abs(z) ** 2) ** -0.5, whitney_cells(t_min=1e-6, t_fine=1e-4), circ)
r = np.geomspace(1e-3, 1, 7)
for name, m in [("segment", seg), ("(1-|z|^2)^-1/2", power)]:
    prof = vanishing_profile(m, radii=r)
    print(name.ljust(16), np.round(prof.values, 3))

# %%
# The collar deficit is the norm of the part of the measure lying within r of
# the boundary.  It tends to 0 for vanishing measures and stays near 1 for the
# segment.

for r0, d in collar_deficit(seg, [0.1, 0.01], radii=np.geomspace(1e-3, 2, 48)):
    print(f"segment deficit at r = {r0}: {d:.3f}")
