"""
Schwarzian derivatives and conformal welding
============================================

The Schwarzian S(f) = f'''/f' - 3/2 (f''/f')^2 vanishes exactly on Mobius
maps.  Welding a Jordan curve composes its interior and exterior boundary
correspondences into a circle homeomorphism h.
"""

import numpy as np

from carleson.analysis import CircleFunction, a_infty_check, bmo_norm, cocycle_residual, schwarzian
from carleson.confmap import Koebe, Mobius, PolyMap, welding
from carleson.geometry import generate_curve, unit_circle

z = np.array([0.1, 0.3j, -0.4 + 0.2j])
print("Mobius:", np.abs(schwarzian(Mobius(0.3 + 0.2j, 1.0), z)).max())
print("Koebe :", schwarzian(Koebe(), z))
print("exact :", -6 / (1 - z**2) ** 2)
print("finite differences:", schwarzian(Koebe(), z, "finite-difference"))

# %%
# The cocycle identity S(f o g) = S(f)(g) g'^2 + S(g).

print("cocycle residual:", cocycle_residual(PolyMap(0.2), Mobius(0.4), z).max())

# %%
# Welding: the circle gives a rotation, ellipses and stars give smooth
# homeomorphisms whose log-derivative has small BMO norm.

w = welding(unit_circle(512))
print("circle: h(t) - t spread", np.ptp(w.h.H - w.h.theta))
for c in [0.2, 0.1, 0.05]:
    h = welding(generate_curve("ellipse", 1024, c=c)).h
    print(f"ellipse c={c}: BMO(log h') = {bmo_norm(CircleFunction(np.log(h.dH))).norm:.4f}")
star = welding(generate_curve("star", 1024, a=0.1, k=3)).h
print("star: A-infinity derivative:", a_infty_check(CircleFunction(star.dH)).passed)
