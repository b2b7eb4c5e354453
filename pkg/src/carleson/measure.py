"""Finite atomic measures on planar domains and their Carleson norms.

A measure is a list of weighted atoms living in the domain bounded by a
:class:`~carleson.geometry.JordanCurve` (or in its exterior).  Absolutely
continuous measures enter through cell-center quadrature: build a
:class:`Cells` partition and call :func:`from_density`.

Every norm below is a supremum over a finite grid of boundary centers and
radii, hence a certified lower bound of the true quantity.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import InitVar, dataclass, field
from functools import cached_property

import numpy as np

from .errors import DomainMismatchError, OutsideDomainError, ParameterError
from .geometry import JordanCurve, _as_points, contains_points, distances_to_curve

# Atoms at distance <= r * (1 + TIE) from a center count as inside D(z, r).
TIE = 1e-14
DEFAULT_RADII = 64
_BLOCK = 1 << 22
_BOX_MIN_ATOMS = 4096
_BOXES = 128  # boxes per side of the bounding square


@dataclass(frozen=True, eq=False)
class Measure:
    """Weighted atoms ``(points[k], weights[k])`` in a domain.

    ``exterior=True`` places the measure in the unbounded complementary
    domain (used for measures on the exterior of the unit disk).
    ``validate=False`` skips the polyline interior test; transport
    operations use it because the map already guarantees membership in the
    true domain while the inscribed polyline may not.
    """

    points: np.ndarray
    weights: np.ndarray
    domain: JordanCurve
    exterior: bool = False
    validate: InitVar[bool] = True

    def __post_init__(self, validate):
        p = _as_points(self.points) if len(np.atleast_1d(self.points)) else np.zeros(0, complex)
        w = np.atleast_1d(np.asarray(self.weights, float))
        if p.shape != w.shape:
            raise ParameterError(f"{len(p)} points but {len(w)} weights")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ParameterError("weights must be finite and nonnegative")
        if not np.all(np.isfinite(p)):
            raise ParameterError("atom locations must be finite")
        for a in (p, w):
            a.setflags(write=False)
        object.__setattr__(self, "points", p)
        object.__setattr__(self, "weights", w)
        if validate and len(p):
            inside = contains_points(p, self.domain)
            ok = ~inside if self.exterior else inside
            if not ok.all():
                bad = p[~ok][0]
                raise OutsideDomainError(f"atom {bad} is not strictly inside the domain")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    @cached_property
    def boundary_distance(self) -> np.ndarray:
        return distances_to_curve(self.points, self.domain)

    def subset(self, mask) -> "Measure":
        return Measure(self.points[mask], self.weights[mask], self.domain, self.exterior, validate=False)

    def to_dict(self) -> dict:
        return {
            "domain": self.domain.to_dict(),
            "exterior": self.exterior,
            "atoms": [[float(p.real), float(p.imag), float(w)] for p, w in zip(self.points, self.weights)],
        }

    @classmethod
    def from_dict(cls, d: dict, validate: bool = True) -> "Measure":
        dom = d["domain"]
        if isinstance(dom, str):
            with open(dom) as fh:
                dom = json.load(fh)
        domain = JordanCurve.from_dict(dom)
        atoms = np.asarray(d.get("atoms", []), float).reshape(-1, 3)
        return cls(atoms[:, 0] + 1j * atoms[:, 1], atoms[:, 2], domain, bool(d.get("exterior", False)), validate)


def zero_measure(domain: JordanCurve, exterior: bool = False) -> Measure:
    return Measure(np.zeros(0, complex), np.zeros(0), domain, exterior, validate=False)


def _same_domain(m1: Measure, m2: Measure) -> bool:
    if m1.exterior != m2.exterior:
        return False
    a, b = m1.domain, m2.domain
    return a is b or (a.n == b.n and np.array_equal(a.samples, b.samples))


def scale(m: Measure, a: float) -> Measure:
    if a < 0:
        raise ParameterError("scale factor must be nonnegative")
    return Measure(m.points, m.weights * a, m.domain, m.exterior, validate=False)


def add(m1: Measure, m2: Measure) -> Measure:
    if not _same_domain(m1, m2):
        raise DomainMismatchError("cannot add measures on different domains")
    return Measure(np.concatenate([m1.points, m2.points]), np.concatenate([m1.weights, m2.weights]),
                   m1.domain, m1.exterior, validate=False)


# ---------------------------------------------------------------------------
# grids


ATOM_RADII_CAP = 64


def default_radii(domain: JordanCurve, count: int = DEFAULT_RADII) -> np.ndarray:
    """``count`` log-spaced radii in ``[1e-3 diam, diam]``."""
    d = domain.diameter
    return np.geomspace(1e-3 * d, d, count)


def _check_grid(m: Measure, centers, radii):
    c = m.domain.samples if centers is None else _as_points(centers)
    r = default_radii(m.domain) if radii is None else np.asarray(radii, float).ravel()
    if len(c) == 0 or len(r) == 0:
        raise ParameterError("empty center or radius grid")
    if np.any(r <= 0) or np.any(r > m.domain.diameter * (1 + 1e-12)):
        raise ParameterError("radii must lie in (0, diameter]")
    return c, r


def _mass_block(points, weights, centers, radii_sorted):
    nr = len(radii_sorted)
    d = np.abs(points[None, :] - centers[:, None])
    idx = np.searchsorted(radii_sorted * (1 + TIE), d, side="left")
    idx += (np.arange(len(centers)) * (nr + 1))[:, None]
    counts = np.bincount(idx.ravel(), weights=np.broadcast_to(weights, d.shape).ravel(),
                         minlength=len(centers) * (nr + 1))
    return np.cumsum(counts.reshape(len(centers), nr + 1), axis=1)[:, :nr]


@dataclass(frozen=True)
class _Boxes:
    """Atoms bucketed into square boxes, sorted by box."""

    points: np.ndarray
    weights: np.ndarray
    start: np.ndarray
    size: np.ndarray
    center: np.ndarray
    reach: np.ndarray  # max distance from the box center to its atoms
    mass: np.ndarray

    @classmethod
    def build(cls, points, weights, per_side: int = _BOXES) -> "_Boxes":
        x, y = points.real, points.imag
        h = max(np.ptp(x), np.ptp(y)) / per_side or 1.0
        bx = np.floor((x - x.min()) / h).astype(np.int64)
        by = np.floor((y - y.min()) / h).astype(np.int64)
        order = np.argsort(bx * (per_side + 2) + by, kind="stable")
        key = (bx * (per_side + 2) + by)[order]
        _, start, size = np.unique(key, return_index=True, return_counts=True)
        pts, wts = points[order], weights[order]
        center = np.add.reduceat(pts, start) / size
        reach = np.maximum.reduceat(np.abs(pts - np.repeat(center, size)), start)
        return cls(pts, wts, start, size, center, reach, np.add.reduceat(wts, start))


def _mass_block_boxed(boxes: _Boxes, centers, radii_sorted):
    # a box whose distance range lies in one radius bin contributes its total
    # mass there; the remaining (center, box) pairs are resolved atom by atom
    nr = len(radii_sorted)
    t = radii_sorted * (1 + TIE)
    base = np.arange(len(centers)) * (nr + 1)
    D = np.abs(centers[:, None] - boxes.center[None, :])
    lo = np.searchsorted(t, (D - boxes.reach) * (1 - 1e-12), side="left")
    hi = np.searchsorted(t, (D + boxes.reach) * (1 + 1e-12), side="left")
    same = lo == hi
    size = len(centers) * (nr + 1)
    counts = np.bincount((lo + base[:, None])[same], weights=np.broadcast_to(boxes.mass, D.shape)[same],
                         minlength=size)
    ci, bj = np.nonzero(~same)
    n = boxes.size[bj]
    first = np.cumsum(n) - n
    atom = np.repeat(boxes.start[bj] - first, n) + np.arange(n.sum())
    row = np.repeat(ci, n)
    d = np.abs(boxes.points[atom] - centers[row])
    counts += np.bincount(np.searchsorted(t, d, side="left") + base[row], weights=boxes.weights[atom],
                          minlength=size)
    return np.cumsum(counts.reshape(len(centers), nr + 1), axis=1)[:, :nr]


def disk_masses(m: Measure, centers, radii, workers: int = 1) -> np.ndarray:
    """Mass of ``m`` in ``D(z, r)`` for every center (rows) and radius (columns).

    Large measures are bucketed into boxes so that far boxes falling inside
    one radius bin are counted in bulk; the disk membership test is the same
    closed-disk test as for single atoms. The result does not depend on
    ``workers``: blocks are independent and reassembled in order.
    """
    c = _as_points(centers)
    r = np.asarray(radii, float).ravel()
    order = np.argsort(r)
    out = np.zeros((len(c), len(r)))
    if len(m) == 0:
        return out
    rows = max(1, _BLOCK // len(m))
    blocks = [(lo, min(len(c), lo + rows)) for lo in range(0, len(c), rows)]
    boxes = _Boxes.build(m.points, m.weights) if len(m) >= _BOX_MIN_ATOMS else None

    def run(b):
        lo, hi = b
        if boxes is None:
            return _mass_block(m.points, m.weights, c[lo:hi], r[order])
        return _mass_block_boxed(boxes, c[lo:hi], r[order])

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(run, blocks))
    else:
        parts = [run(b) for b in blocks]
    sorted_masses = np.vstack(parts)
    out[:, order] = sorted_masses
    return out


@dataclass(frozen=True)
class CarlesonReport:
    norm: float
    witness: tuple[complex, float]
    grid: tuple[int, int]


def carleson_norm(m: Measure, centers=None, radii=None, workers: int = 1) -> CarlesonReport:
    """Grid supremum of ``m(D(z, r)) / r`` over boundary centers and radii.

    Defaults: the domain samples as centers, :func:`default_radii` as radii.
    With default radii and at most ``ATOM_RADII_CAP`` atoms, each atom's
    distance to its nearest center is added to the radius grid.
    """
    c, r = _check_grid(m, centers, radii)
    if radii is None and 0 < len(m) <= ATOM_RADII_CAP:
        # for few atoms the sup over r sits at an atom's distance to its nearest center
        near = np.array([np.abs(c - p).min() for p in m.points])
        r = np.union1d(r, near[(near > 0) & (near <= m.domain.diameter)])
    ratio = disk_masses(m, c, r, workers) / r[None, :]
    i, j = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    return CarlesonReport(float(ratio[i, j]), (complex(c[i]), float(r[j])), (len(c), len(r)))


@dataclass(frozen=True)
class VanishingProfile:
    """Rows ``(r, sup_z m(D(z, r))/r)`` with strictly decreasing radii."""

    radii: np.ndarray
    values: np.ndarray

    @property
    def entries(self) -> list[tuple[float, float]]:
        return [(float(a), float(b)) for a, b in zip(self.radii, self.values)]

    @property
    def peak(self) -> float:
        return float(self.values.max()) if len(self.values) else 0.0


def vanishing_profile(m: Measure, centers=None, radii=None, workers: int = 1) -> VanishingProfile:
    c, r = _check_grid(m, centers, radii)
    r = np.unique(r)[::-1]
    values = (disk_masses(m, c, r, workers) / r[None, :]).max(axis=0)
    return VanishingProfile(r, values)


def restrict_to_collar(m: Measure, r: float) -> Measure:
    """Keep exactly the atoms farther than ``r`` from the boundary."""
    if r < 0:
        raise ParameterError("collar width must be >= 0")
    return m.subset(m.boundary_distance > r)


def collar_deficit(m: Measure, collar_radii, centers=None, radii=None, workers: int = 1):
    """``[(r, ||m - m_r||_*)]`` where ``m_r`` is ``m`` restricted to the collar complement.

    ``collar_radii`` must be decreasing.  ``centers``/``radii`` set the norm grid.
    """
    widths = np.asarray(collar_radii, float).ravel()
    if np.any(np.diff(widths) > 0):
        raise ParameterError("collar radii must be decreasing")
    dist = m.boundary_distance
    out = []
    for w in widths:
        near = m.subset(dist <= w)
        out.append((float(w), carleson_norm(near, centers, radii, workers).norm))
    return out


# ---------------------------------------------------------------------------
# cell-center discretization


@dataclass(frozen=True, eq=False)
class Cells:
    """Quadrature cells: a center and an area per cell."""

    centers: np.ndarray
    areas: np.ndarray

    def __len__(self) -> int:
        return len(self.centers)


def cartesian_cells(n: int, domain: JordanCurve) -> Cells:
    """``n x n`` square cells over the domain's bounding box, centers inside the domain."""
    z = domain.samples
    x0, x1, y0, y1 = z.real.min(), z.real.max(), z.imag.min(), z.imag.max()
    side = max(x1 - x0, y1 - y0)
    h = side / n
    xs = x0 + (np.arange(n) + 0.5) * h
    ys = y0 + (np.arange(n) + 0.5) * h
    c = (xs[None, :] + 1j * ys[:, None]).ravel()
    c = c[contains_points(c, domain)]
    return Cells(c, np.full(len(c), h * h))


def polar_cells(edges, counts) -> Cells:
    """Annular-sector cells of the disk from radial ``edges`` and per-ring angular ``counts``."""
    edges = np.asarray(edges, float)
    centers, areas = [], []
    for k, m in enumerate(counts):
        r0, r1 = edges[k], edges[k + 1]
        rm = 0.5 * (r0 + r1)
        th = 2 * np.pi * (np.arange(m) + 0.5) / m
        centers.append(rm * np.exp(1j * th))
        areas.append(np.full(m, np.pi * (r1 * r1 - r0 * r0) / m))
    return Cells(np.concatenate(centers), np.concatenate(areas))


def whitney_cells(t_min: float = 1e-6, ratio: float = 0.8, max_angles: int = 16384,
                  aspect: float = 2.0, t_fine: float | None = None) -> Cells:
    """Near-boundary-adapted cells of the unit disk.

    Rings are geometric in the boundary distance ``t = 1 - |z|`` (factor
    ``ratio`` per ring) from ``t = 1/2`` down to ``t_fine``; below that a
    single ring reaches ``t_min`` and a last ring ``[1 - t_min, 1)`` carries
    the remaining sliver.  Angular counts keep cells about ``aspect`` times
    as wide as tall until ``max_angles`` caps them.
    """
    t_fine = t_min if t_fine is None else t_fine
    inner = list(np.linspace(0.0, 0.5, 5))
    ts = [0.5]
    while ts[-1] * ratio > t_fine:
        ts.append(ts[-1] * ratio)
    ts.append(t_fine)
    if t_min < t_fine:
        ts.append(t_min)
    ts.append(0.0)
    edges = np.array(inner[:-1] + [1 - t for t in ts])
    counts = []
    for k in range(len(edges) - 1):
        r0, r1 = edges[k], edges[k + 1]
        width = max(r1 - r0, 1e-300)
        m = int(np.ceil(2 * np.pi * r1 / (aspect * width))) if r1 > 0 else 8
        counts.append(int(np.clip(m, 8, max_angles)))
    return polar_cells(edges, counts)


def exterior_cells(r_max: float = 3.0, t_min: float = 1e-5, ratio: float = 0.8,
                   max_angles: int = 4096, aspect: float = 2.0) -> Cells:
    """Cells of the annulus ``1 < |z| <= r_max`` refined geometrically toward ``|z| = 1``."""
    ts = [r_max - 1.0]
    while ts[-1] * ratio > t_min:
        ts.append(ts[-1] * ratio)
    ts.append(0.0)
    edges = 1.0 + np.array(ts[::-1])
    counts = []
    for k in range(len(edges) - 1):
        width = edges[k + 1] - edges[k]
        m = int(np.ceil(2 * np.pi * edges[k] / (aspect * width)))
        counts.append(int(np.clip(m, 8, max_angles)))
    return polar_cells(edges, counts)


def from_density(density, cells: Cells, domain: JordanCurve, exterior: bool = False,
                 validate: bool = False) -> Measure:
    """Cell-center quadrature of ``density(z) dx dy``: weight = density(center) * area."""
    w = np.asarray(density(cells.centers), float) * cells.areas
    return Measure(cells.centers, w, domain, exterior, validate)


def segment_measure(domain: JordanCurve, n: int = 4096, start: complex = 0.0, end: complex = 1.0) -> Measure:
    """Unit linear density along ``[start, end)`` as ``n`` midpoint atoms."""
    s = (np.arange(n) + 0.5) / n
    pts = start + (end - start) * s
    return Measure(pts, np.full(n, abs(end - start) / n), domain, validate=False)
