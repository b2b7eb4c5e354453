"""
Douady-Earle extensions and Beltrami coefficients
=================================================

A quasisymmetric circle homeomorphism extends to a quasiconformal
self-map of the disk by the barycentric construction.  Its Beltrami
coefficient measures the distortion; the extension is bi-Lipschitz in
the Poincare metric.
"""

import numpy as np

from carleson.analysis import quasisymmetry_modulus
from carleson.geometry import unit_circle
from carleson.measure import Measure, carleson_norm
from carleson.qcmap import (
    CircleHomeomorphism, DouadyEarleMap, beltrami_of, douady_earle, poincare_bilipschitz,
    qc_transport_atoms, random_pairs,
)

h = CircleHomeomorphism.from_lift(lambda x: x + 0.3 * np.sin(x), lambda x: 1 + 0.3 * np.cos(x), 1024)
print("quasisymmetry modulus:", round(quasisymmetry_modulus(h).modulus, 3))

grid = douady_earle(h, n_radii=64, n_angles=256)
mu = beltrami_of(grid)
print(f"sup |mu| = {mu.sup_norm:.4f}, solver residual {grid.residual:.1e}")

# %%
# Poincare bi-Lipschitz constant over random pairs of points.

de = DouadyEarleMap(h)
pairs = random_pairs(np.random.default_rng(1), 500)
print("bi-Lipschitz constant:", round(poincare_bilipschitz(de, pairs).constant, 4))

# %%
# Transporting a random measure: the Carleson norm changes by a bounded factor.

rng = np.random.default_rng(2)
circle = unit_circle(256)
z = 0.98 * np.sqrt(rng.random(2000)) * np.exp(2j * np.pi * rng.random(2000))
m = Measure(z, rng.random(2000) / 2000, circle)
for way in ["push", "pull"]:
    out = qc_transport_atoms(m, de, way)
    print(way, "ratio:", round(carleson_norm(out).norm / carleson_norm(m).norm, 4))
