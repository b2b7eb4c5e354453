"""Carleson measures on planar domains and their transport under conformal
and quasiconformal maps.

Submodules: :mod:`geometry` (Jordan curves), :mod:`measure` (atomic
measures, Carleson norms, vanishing profiles), :mod:`confmap` (conformal
maps, Theodorsen, welding), :mod:`qcmap` (circle homeomorphisms,
Douady-Earle, Beltrami fields), :mod:`analysis` (BMO, A-infinity,
quasisymmetry, Schwarzian) and :mod:`harness` (experiments and the ``cm``
CLI).
"""

from .errors import *  # noqa: F401,F403
from .geometry import (
    JordanCurve, ahlfors_constant, chord_arc_constant, chord_arc_ratio, contains, distance_to_curve,
    generate_curve, locate, unit_circle, winding_numbers,
)
from .measure import (
    Cells, Measure, add, carleson_norm, collar_deficit, default_radii, from_density, restrict_to_collar,
    scale, segment_measure, vanishing_profile, whitney_cells, zero_measure,
)
from .confmap import (
    Composite, ConformalMap, EllipseExterior, Koebe, Lens, Mobius, PolyMap, TheodorsenMap,
    koebe_bounds_check, map_from_descriptor, pull_back, push_forward, theodorsen_correspondence,
    theodorsen_map, welding,
)
from .qcmap import (
    BeltramiField, CircleHomeomorphism, DouadyEarleMap, beltrami_carleson, beltrami_compose, beltrami_of,
    douady_earle, poincare_bilipschitz, qc_transport, qc_transport_atoms,
)
from .analysis import (
    ArcFamily, CircleFunction, HolomorphicSample, a_infty_check, b0_profile, b_norm, bmo_norm,
    cocycle_residual, curly_b_norm, quasisymmetry_modulus, schwarzian, symmetric_profile, vmo_profile,
)

__version__ = "0.1.0"
