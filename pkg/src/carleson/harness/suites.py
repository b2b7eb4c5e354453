"""Fixed measure libraries shared by the experiments.

Every suite entry is built from Whitney-type cells of the unit disk, so a
density on the disk and its counterpart on an image domain ``f(disk)`` use
the same quadrature: image atoms sit at ``f(c)`` with weight
``lambda * |f'(c)|^2 * area(c)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..confmap import ConformalMap
from ..errors import ConfigError
from ..geometry import JordanCurve, unit_circle
from ..measure import Cells, Measure, segment_measure, whitney_cells

# (name, vanishing?)
SUITE = {
    "area": True,
    "boundary_power_25": True,
    "boundary_power_50": True,
    "boundary_power_75": True,
    "bump": True,
    "points": True,
    "cloud": True,
    "segment": False,
}

# boundary_power_75 is vanishing, but its profile decays like r^(1/4): three
# resolvable decades give final/peak ~ 0.18, so the verdict cannot certify it
VANISHING_SUITE = [k for k, v in SUITE.items() if v and k != "boundary_power_75"]
BOUNDEDNESS_SUITE = ["area", "boundary_power_25", "boundary_power_50", "boundary_power_75",
                     "bump", "segment", "points", "cloud"]

_POINTS = np.array([0.0, 0.5, -0.4 + 0.3j, 0.2 - 0.6j, 0.8j])
_BUMP_CENTER, _BUMP_RADIUS = 0.2 + 0.1j, 0.3


@dataclass(frozen=True)
class CellGrid:
    t_min: float = 1e-4
    ratio: float = 0.8
    aspect: float = 2.0
    max_angles: int = 8192

    def cells(self) -> Cells:
        return whitney_cells(t_min=self.t_min, ratio=self.ratio, max_angles=self.max_angles,
                             aspect=self.aspect)

    def refined(self) -> "CellGrid":
        """Twice as many rings and angles."""
        return CellGrid(self.t_min, float(np.sqrt(self.ratio)), self.aspect / 2, self.max_angles * 2)


def _bump(z):
    s = np.abs(z - _BUMP_CENTER) / _BUMP_RADIUS
    return np.where(s < 1, (1 - s**2) ** 2, 0.0)


def disk_density(name: str):
    """Density on the disk (function of the disk point) for the density entries."""
    if name == "area":
        return lambda z: np.ones(np.shape(z))
    if name.startswith("boundary_power_"):
        s = int(name.rsplit("_", 1)[1]) / 100
        return lambda z: (1 - np.abs(z) ** 2) ** (-s)
    if name == "bump":
        return _bump
    return None


def _cloud(rng: np.random.Generator, count: int = 200):
    pts = 0.9 * np.sqrt(rng.random(count)) * np.exp(2j * np.pi * rng.random(count))
    return pts, rng.exponential(1.0, count) / count


def disk_suite(names, cells: Cells, domain: JordanCurve, seed: int = 0) -> dict[str, Measure]:
    """Suite measures on the unit disk with ``domain`` as the center grid."""
    rng = np.random.default_rng(seed)
    out = {}
    for name in names:
        dens = disk_density(name)
        if dens is not None:
            out[name] = Measure(cells.centers, dens(cells.centers) * cells.areas, domain, validate=False)
        elif name == "segment":
            out[name] = segment_measure(domain, 4096, 0.0, 1.0)
        elif name == "points":
            out[name] = Measure(_POINTS, np.full(len(_POINTS), 0.2), domain, validate=False)
        elif name == "cloud":
            p, w = _cloud(rng)
            out[name] = Measure(p, w, domain, validate=False)
        else:
            raise ConfigError(f"unknown suite measure {name!r}")
    return out


def image_suite(names, fmap: ConformalMap, cells: Cells, domain: JordanCurve, seed: int = 0) -> dict[str, Measure]:
    """The same library placed on ``fmap(disk)``.

    Densities are read in disk coordinates (``boundary_power_s`` is
    ``(1 - |f^{-1}(w)|^2)^{-s}``); ``area`` and ``bump`` use the image
    point.  Atoms are images of the disk suite atoms; the segment runs from
    ``f(0)`` to the boundary point ``f(1)``.
    """
    rng = np.random.default_rng(seed)
    out = {}
    c = cells.centers
    w_img = None
    for name in names:
        dens = disk_density(name)
        if dens is not None:
            if w_img is None:
                w_img = fmap.evaluate(c)
                jac = np.abs(fmap.deriv(c)) ** 2 * cells.areas
            lam = dens(w_img) if name in ("area", "bump") else dens(c)
            out[name] = Measure(w_img, lam * jac, domain, validate=False)
        elif name == "segment":
            # radial limit: some maps (lens) are singular exactly at z = 1
            a, b = fmap.evaluate(np.array([0j, 1 - 1e-12 + 0j]))
            out[name] = segment_measure(domain, 4096, complex(a), complex(b))
        elif name == "points":
            out[name] = Measure(fmap.evaluate(_POINTS), np.full(len(_POINTS), 0.2), domain, validate=False)
        elif name == "cloud":
            p, w = _cloud(rng)
            out[name] = Measure(fmap.evaluate(p), w, domain, validate=False)
        else:
            raise ConfigError(f"unknown suite measure {name!r}")
    return out


def circle_domain(n: int) -> JordanCurve:
    return unit_circle(n)
