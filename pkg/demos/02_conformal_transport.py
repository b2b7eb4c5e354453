"""
Transporting measures through conformal maps
============================================

Pull-back moves atoms with the inverse map and rescales by |f'|^-1;
push-forward moves them with f and rescales by |f'|.  For conformal maps
of chord-arc domains both operations keep Carleson norms comparable.
"""

import numpy as np

from carleson.confmap import Lens, Mobius, PolyMap, pull_back, push_forward, theodorsen_map
from carleson.geometry import chord_arc_constant, generate_curve, unit_circle
from carleson.measure import Measure, carleson_norm

circle = unit_circle(512)

# %%
# Pulling the unit atom at 0 back through the disk automorphism with a = 1/2
# gives an atom at -1/2 of mass 3/4, with Carleson norm 3/4 / (1/2) = 1.5.

nu = pull_back(Measure([0j], [1.0], circle), Mobius(0.5), circle)
print("atom", nu.points[0], "weight", nu.weights[0], "norm", round(carleson_norm(nu).norm, 4))

# %%
# Random measures on the image of three maps.  The ratio of norms before and
# after transport stays close to 1.

rng = np.random.default_rng(0)
z = 0.99 * np.sqrt(rng.random(3000)) * np.exp(2j * np.pi * rng.random(3000))
w = rng.random(3000) / 3000
disk = Measure(z, w, circle)
star = theodorsen_map(generate_curve("star", 1024, a=0.1, k=3))
for f in [PolyMap(0.3), Lens(0.8), star]:
    image = push_forward(disk, f)
    ratio = carleson_norm(image).norm / carleson_norm(disk).norm
    print(f"{f.kind:10s} chord-arc {chord_arc_constant(f.image_curve(512)).constant:5.2f}  push ratio {ratio:.3f}")

# %%
# A round trip through pull-back and push-forward restores the measure.

f = PolyMap(0.3)
image = push_forward(disk, f)
back = push_forward(pull_back(image, f, circle), f, image.domain)
print("round-trip error:", np.abs(back.points - image.points).max())
