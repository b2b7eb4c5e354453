"""
BMO, VMO and A-infinity weights on the circle
=============================================

Functions on the circle are sampled on a power-of-two grid; mean
oscillation is computed over dyadic arcs.
"""

import numpy as np

from carleson.analysis import CircleFunction, a_infty_check, bmo_norm, vmo_profile

n = 1024
semi = CircleFunction.from_callable(lambda t: (t < np.pi).astype(float), n)
smooth = CircleFunction.from_callable(np.cos, n)

print("BMO of the half-circle indicator:", bmo_norm(semi).norm)
print("BMO of cos:", round(bmo_norm(smooth).norm, 4))

# %%
# VMO: the oscillation of cos dies out on short arcs, the jump does not.

for name, f in [("cos", smooth), ("indicator", semi)]:
    print(name.ljust(10), [round(v, 3) for _, v in vmo_profile(f)])

# %%
# A-infinity: a weight vanishing on a half-circle fails, with a witness arc.

for name, w in [("1", CircleFunction(np.ones(n))), ("2 + cos", CircleFunction.from_callable(lambda t: 2 + np.cos(t), n)),
                ("indicator", semi)]:
    rep = a_infty_check(w)
    print(f"{name:10s} passed={rep.passed} beta_min={rep.beta_min:.3f}")
print("witness:", a_infty_check(semi).worst)
