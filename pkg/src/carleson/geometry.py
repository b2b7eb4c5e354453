"""Sampled Jordan curves and the geometric constants measured on them.

Points of the plane are Python/numpy complex numbers throughout.  A
:class:`JordanCurve` is a closed polyline through ``n`` samples taken at
uniform parameter steps; every length below is a polyline length.

The unit circle is the reference boundary of every transported measure, so
curves of family ``"circle"`` answer :func:`distance_to_curve` and
:func:`contains` with the exact circle instead of the inscribed polygon.
"""

from __future__ import annotations

import json
from dataclasses import InitVar, dataclass, field
from functools import cached_property
from typing import Literal

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.spatial import ConvexHull
from shapely.geometry import LinearRing

from .errors import InvalidCurveError, ParameterError

PlanePoint = complex

FAMILIES = ("circle", "ellipse", "polygon", "polyimage", "lens", "star", "koch", "custom")

# Max elements held by one broadcast block in the pairwise sweeps.
_BLOCK = 1 << 22


def as_complex(p) -> complex:
    """Coerce ``(x, y)`` pairs or complex-like values to ``complex``."""
    if isinstance(p, (tuple, list)) and len(p) == 2:
        return complex(float(p[0]), float(p[1]))
    return complex(p)


def _as_points(points) -> np.ndarray:
    arr = np.asarray(points)
    if arr.dtype.kind != "c" and arr.ndim >= 1 and arr.shape[-1] == 2 and arr.ndim == 2:
        arr = arr[:, 0] + 1j * arr[:, 1]
    return np.atleast_1d(arr.astype(complex))


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True, eq=False)
class JordanCurve:
    """Closed polyline through ``n`` samples (sample 0 follows sample n-1)."""

    samples: np.ndarray
    family: str = "custom"
    params: dict = field(default_factory=dict)
    check: InitVar[bool] = True

    def __post_init__(self, check):
        z = np.ascontiguousarray(_as_points(self.samples))
        z.setflags(write=False)
        object.__setattr__(self, "samples", z)
        if check:
            self.validate()

    def validate(self) -> None:
        n = self.n
        if n < 64 or not _is_pow2(n):
            raise InvalidCurveError(f"sample count must be a power of two >= 64, got {n}")
        if not np.all(np.isfinite(self.samples)):
            raise InvalidCurveError("non-finite sample")
        if np.any(self.segment_lengths <= 0):
            raise InvalidCurveError("consecutive samples coincide")
        ring = LinearRing(np.column_stack([self.samples.real, self.samples.imag]))
        if not ring.is_simple:
            raise InvalidCurveError(f"self-intersection detected in {self.family} curve")

    @property
    def n(self) -> int:
        return len(self.samples)

    @cached_property
    def segments(self) -> np.ndarray:
        return np.roll(self.samples, -1) - self.samples

    @cached_property
    def segment_lengths(self) -> np.ndarray:
        return np.abs(self.segments)

    @cached_property
    def arc_positions(self) -> np.ndarray:
        """Polyline arc length from sample 0 to each sample."""
        return np.concatenate([[0.0], np.cumsum(self.segment_lengths)[:-1]])

    @cached_property
    def length(self) -> float:
        return float(self.segment_lengths.sum())

    @cached_property
    def diameter(self) -> float:
        pts = np.column_stack([self.samples.real, self.samples.imag])
        hull = self.samples[ConvexHull(pts).vertices]
        return float(np.abs(hull[:, None] - hull[None, :]).max())

    @property
    def tau_on(self) -> float:
        """On-boundary tolerance, relative to the diameter."""
        return 1e-12 * self.diameter

    @property
    def is_unit_circle(self) -> bool:
        return self.family == "circle"

    def descriptor(self) -> dict:
        return {"family": self.family, "params": dict(self.params), "n": self.n}

    def to_dict(self) -> dict:
        d = self.descriptor()
        d["samples"] = [[float(z.real), float(z.imag)] for z in self.samples]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "JordanCurve":
        if "samples" in d:
            return cls(np.asarray(d["samples"], float), d.get("family", "custom"), dict(d.get("params", {})))
        return generate_curve(d["family"], int(d["n"]), **d.get("params", {}))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


# ---------------------------------------------------------------------------
# generation


def koch_vertices(level: int) -> np.ndarray:
    """Vertices of the level-``level`` Koch snowflake, counterclockwise.

    The seed is an equilateral triangle of side 1 centred at the origin; each
    level replaces every edge by the four-edge generator with the bump
    pointing outward, giving ``3 * 4**level`` edges.
    """
    if level < 0:
        raise ParameterError("koch level must be >= 0")
    pts = np.array([0.0, 0.5 - 1j * np.sqrt(3) / 2, 1.0], dtype=complex)  # counterclockwise
    bump = np.exp(-1j * np.pi / 3)
    for _ in range(level):
        a = pts
        d = (np.roll(pts, -1) - a) / 3
        pts = np.stack([a, a + d, a + d + d * bump, a + 2 * d], axis=1).ravel()
    return pts - pts.mean()


def _resample_polyline(vertices: np.ndarray, n: int) -> np.ndarray:
    closed = np.append(vertices, vertices[0])
    s = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(closed)))])
    t = np.arange(n) * (s[-1] / n)
    return np.interp(t, s, closed.real) + 1j * np.interp(t, s, closed.imag)


def lens_boundary(alpha: float, theta: np.ndarray) -> np.ndarray:
    """Boundary values of the lens map of opening ``alpha*pi`` at ``e^{i theta}``."""
    theta = np.mod(np.asarray(theta, float), 2 * np.pi)
    out = np.empty(theta.shape, complex)
    at_one = np.isclose(theta, 0.0, atol=1e-15) | np.isclose(theta, 2 * np.pi, atol=1e-15)
    at_minus = np.isclose(theta, np.pi, rtol=0, atol=1e-15)
    ok = ~(at_one | at_minus)
    cot = 1.0 / np.tan(theta[ok] / 2)  # (1+z)/(1-z) = i cot(theta/2)
    u = np.abs(cot) ** alpha * np.exp(1j * np.sign(cot) * alpha * np.pi / 2)
    out[ok] = (u - 1) / (u + 1)
    out[at_one] = 1.0
    out[at_minus] = -1.0
    return out


_FAMILY_PARAMS = {"ellipse": ("c",), "polygon": ("vertices",), "polyimage": ("c",), "lens": ("alpha",),
                  "star": ("a", "k"), "koch": ("level",)}


def generate_curve(family: str, n: int, **params) -> JordanCurve:
    """Sample a curve family at ``n`` uniform parameter steps.

    Families and parameters:

    ``circle``            unit circle
    ``ellipse(c)``        ``e^{it} + c e^{-it}``, the image of the exterior map ``z + c/z``; ``|c| < 1``
    ``polygon(vertices)`` counterclockwise vertex list, sampled uniformly in arc length from vertex 0
    ``polyimage(c)``      ``e^{it} + c e^{2it}``; ``|c| < 1/2``
    ``lens(alpha)``       boundary of the lens map image, ``0 < alpha < 2``
    ``star(a, k)``        polar curve ``1 + a cos(k t)``; ``a k < 1``
    ``koch(level)``       Koch snowflake resampled uniformly in arc length
    """
    if not (_is_pow2(int(n)) and n >= 64):
        raise ParameterError(f"n must be a power of two >= 64, got {n}")
    n = int(n)
    missing = [k for k in _FAMILY_PARAMS.get(family, ()) if k not in params]
    if missing:
        raise ParameterError(f"{family} needs parameter(s) {', '.join(missing)}")
    t = 2 * np.pi * np.arange(n) / n
    e = np.exp(1j * t)
    if family == "circle":
        z = e
    elif family == "ellipse":
        c = float(params["c"])
        if not abs(c) < 1:
            raise ParameterError("ellipse needs |c| < 1")
        z = e + c / e
    elif family == "polygon":
        verts = _as_points(params["vertices"])
        if len(verts) < 3:
            raise ParameterError("polygon needs at least three vertices")
        params = {"vertices": [[float(v.real), float(v.imag)] for v in verts]}
        z = _resample_polyline(verts, n)
    elif family == "polyimage":
        c = complex(params["c"])
        if not abs(c) < 0.5:
            raise ParameterError("polyimage needs |c| < 1/2")
        z = e + c * e**2
        params = {"c": float(c.real)} if c.imag == 0 else {"c": [c.real, c.imag]}
    elif family == "lens":
        alpha = float(params["alpha"])
        if not 0 < alpha < 2:
            raise ParameterError("lens needs 0 < alpha < 2")
        z = lens_boundary(alpha, t)
    elif family == "star":
        a, k = float(params["a"]), int(params["k"])
        if not (a >= 0 and k >= 1 and a * k < 1):
            raise ParameterError("star needs a >= 0, k >= 1 and a*k < 1")
        params = {"a": a, "k": k}
        z = (1 + a * np.cos(k * t)) * e
    elif family == "koch":
        level = int(params["level"])
        params = {"level": level}
        z = _resample_polyline(koch_vertices(level), n)
    else:
        raise ParameterError(f"unknown curve family {family!r}")
    return JordanCurve(z, family, dict(params))


def unit_circle(n: int = 512) -> JordanCurve:
    return generate_curve("circle", n)


# ---------------------------------------------------------------------------
# distances and interior tests


def distances_to_curve(points, curve: JordanCurve) -> np.ndarray:
    """Vectorised :func:`distance_to_curve` over an array of points."""
    p = _as_points(points)
    if curve.is_unit_circle:
        return np.abs(np.abs(p) - 1.0)
    a = curve.samples
    d = curve.segments
    dd = (d * d.conj()).real
    out = np.empty(p.shape, float)
    step = max(1, _BLOCK // curve.n)
    for lo in range(0, len(p), step):
        f = p[lo:lo + step, None] - a[None, :]
        t = np.clip((f * d.conj()).real / dd, 0.0, 1.0)
        out[lo:lo + step] = np.abs(f - t * d).min(axis=1)
    return out


def distance_to_curve(p, curve: JordanCurve) -> float:
    """Distance from ``p`` to the sample polyline (point-to-segment minimum)."""
    return float(distances_to_curve([as_complex(p)], curve)[0])


def winding_numbers(points, curve: JordanCurve) -> np.ndarray:
    """Winding number of the sample polyline about each point."""
    p = _as_points(points)
    if curve.is_unit_circle:
        return (np.abs(p) < 1).astype(int)
    a = curve.samples
    b = np.roll(a, -1)
    out = np.zeros(p.shape, int)
    step = max(1, _BLOCK // curve.n)
    for lo in range(0, len(p), step):
        q = p[lo:lo + step, None]
        left = (b.real - a.real) * (q.imag - a.imag) - (q.real - a.real) * (b.imag - a.imag)
        up = (a.imag <= q.imag) & (b.imag > q.imag) & (left > 0)
        down = (a.imag > q.imag) & (b.imag <= q.imag) & (left < 0)
        out[lo:lo + step] = up.sum(axis=1) - down.sum(axis=1)
    return out


Location = Literal["inside", "outside", "boundary"]


def locate(p, curve: JordanCurve) -> Location:
    """Classify ``p`` as inside, outside, or on the curve (within ``tau_on``)."""
    p = as_complex(p)
    if distance_to_curve(p, curve) <= curve.tau_on:
        return "boundary"
    return "inside" if abs(int(winding_numbers([p], curve)[0])) == 1 else "outside"


def contains(p, curve: JordanCurve) -> bool | str:
    """True iff the winding number about ``p`` is +-1.

    Points within ``tau_on`` of the curve are ambiguous and return the
    string ``"boundary"`` instead of a boolean.
    """
    loc = locate(p, curve)
    return "boundary" if loc == "boundary" else loc == "inside"


def contains_points(points, curve: JordanCurve) -> np.ndarray:
    """Boolean mask of points strictly inside (boundary points count as outside)."""
    p = _as_points(points)
    inside = np.abs(winding_numbers(p, curve)) == 1
    if inside.any():
        near = distances_to_curve(p[inside], curve) <= curve.tau_on
        idx = np.flatnonzero(inside)
        inside[idx[near]] = False
    return inside


# ---------------------------------------------------------------------------
# chord-arc and Ahlfors-regularity constants


@dataclass(frozen=True)
class ChordArcReport:
    constant: float
    witness_pair: tuple[complex, complex]
    witness_index: tuple[int, int]


def _arc_chord(curve: JordanCurve, i: np.ndarray, j: np.ndarray):
    s = curve.arc_positions
    arc = np.abs(s[j] - s[i])
    arc = np.minimum(arc, curve.length - arc)
    chord = np.abs(curve.samples[j] - curve.samples[i])
    return arc, chord


def chord_arc_ratio(curve: JordanCurve, i: int, j: int) -> float:
    """Smaller-arc length over chord length for the sample pair ``(i, j)``."""
    arc, chord = _arc_chord(curve, np.array([i]), np.array([j]))
    if chord[0] == 0:
        raise InvalidCurveError("degenerate chord: coincident samples")
    return float(arc[0] / chord[0])


def chord_arc_constant(curve: JordanCurve) -> ChordArcReport:
    """Max over all sample pairs of (smaller arc)/(chord).

    A lower bound for the chord-arc constant of the underlying curve that can
    only grow when the samples are refined.
    """
    n = curve.n
    z, s, total = curve.samples, curve.arc_positions, curve.length
    best, bi, bj = 0.0, 0, 1
    rows = max(1, _BLOCK // n)
    for lo in range(0, n, rows):
        i = np.arange(lo, min(n, lo + rows))
        arc = np.abs(s[None, :] - s[i, None])
        arc = np.minimum(arc, total - arc)
        chord = np.abs(z[None, :] - z[i, None])
        chord[np.arange(len(i)), i] = np.inf
        if np.any(chord == 0):
            raise InvalidCurveError("degenerate chord: coincident samples")
        ratio = arc / chord
        k = int(np.argmax(ratio))
        r, c = divmod(k, n)
        if ratio[r, c] > best:
            best, bi, bj = float(ratio[r, c]), int(i[r]), int(c)
    return ChordArcReport(best, (complex(z[bi]), complex(z[bj])), (bi, bj))


@dataclass(frozen=True)
class RegularityReport:
    constant: float
    witness: tuple[complex, float]


def length_in_disks(curve: JordanCurve, centers, radii) -> np.ndarray:
    """Polyline length inside ``D(c, r)`` for every center (rows) and radius (columns)."""
    c = _as_points(centers)
    r = np.asarray(radii, float).ravel()
    a, d = curve.samples, curve.segments
    dd = (d * d.conj()).real
    seg_len = np.sqrt(dd)
    out = np.empty((len(c), len(r)))
    rows = max(1, _BLOCK // (curve.n * len(r)))
    for lo in range(0, len(c), rows):
        f = a[None, :] - c[lo:lo + rows, None]
        proj = (f * d.conj()).real
        t0 = -proj / dd
        h2 = (f * f.conj()).real - proj**2 / dd
        disc = (r[None, None, :] ** 2 - h2[..., None]) / dd[None, :, None]
        half = np.sqrt(np.maximum(disc, 0.0))
        t1 = np.maximum(t0[..., None] - half, 0.0)
        t2 = np.minimum(t0[..., None] + half, 1.0)
        inside = np.where(disc > 0, np.maximum(t2 - t1, 0.0), 0.0)
        out[lo:lo + rows] = (inside * seg_len[None, :, None]).sum(axis=1)
    return out


def default_regularity_radii(curve: JordanCurve, count: int = 32) -> np.ndarray:
    lo = 0.5 * curve.segment_lengths.min()
    return np.geomspace(lo, curve.diameter, count)


def ahlfors_constant(curve: JordanCurve, centers=None, radii=None) -> RegularityReport:
    """Max over the (center, radius) grid of (length inside the disk)/radius.

    Defaults: the curve's own samples as centers and 32 log-spaced radii from
    half the smallest sample spacing up to the diameter.
    """
    c = curve.samples if centers is None else _as_points(centers)
    r = default_regularity_radii(curve) if radii is None else np.asarray(radii, float).ravel()
    if len(c) == 0 or len(r) == 0:
        raise ParameterError("empty center or radius grid")
    if np.any(r <= 0):
        raise ParameterError("radii must be positive")
    ratio = length_in_disks(curve, c, r) / r[None, :]
    i, j = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    return RegularityReport(float(ratio[i, j]), (complex(c[i]), float(r[j])))


# ---------------------------------------------------------------------------
# star-like curves


def polar_radius(curve: JordanCurve):
    """Radius function ``rho(psi)`` of a curve star-like about the origin.

    Returns ``(rho, drho)`` callables of the polar angle.  Analytic families
    use closed forms; anything else gets a periodic cubic spline of
    ``log rho`` through the samples, which requires the polar angle to be
    strictly increasing along the curve.
    """
    fam, p = curve.family, curve.params
    if fam == "circle":
        return (lambda psi: np.ones_like(np.asarray(psi, float)),
                lambda psi: np.zeros_like(np.asarray(psi, float)))
    if fam == "star":
        a, k = p["a"], p["k"]
        return (lambda psi: 1 + a * np.cos(k * np.asarray(psi)),
                lambda psi: -a * k * np.sin(k * np.asarray(psi)))
    if fam == "ellipse":
        ax, bx = 1 + p["c"], 1 - p["c"]

        def rho(psi):
            psi = np.asarray(psi)
            return ax * bx / np.sqrt((bx * np.cos(psi)) ** 2 + (ax * np.sin(psi)) ** 2)

        def drho(psi):
            psi = np.asarray(psi)
            q = (bx * np.cos(psi)) ** 2 + (ax * np.sin(psi)) ** 2
            return -0.5 * ax * bx * q**-1.5 * (ax**2 - bx**2) * np.sin(2 * psi)

        return rho, drho
    z = curve.samples
    if np.any(np.abs(z) == 0):
        raise ParameterError("curve passes through the origin; not star-like")
    psi = np.unwrap(np.angle(z))
    if psi[-1] < psi[0]:
        raise ParameterError("curve must be counterclockwise")
    if np.any(np.diff(psi) <= 0) or not np.isclose(psi[-1] - psi[0] + np.angle(z[0] / z[-1]), 2 * np.pi):
        raise ParameterError("polar angle not monotone; curve is not star-like about 0")
    x = np.append(psi, psi[0] + 2 * np.pi)
    y = np.log(np.abs(np.append(z, z[0])))
    spline = CubicSpline(x, y, bc_type="periodic")
    base = psi[0]

    def rho(q):
        q = base + np.mod(np.asarray(q, float) - base, 2 * np.pi)
        return np.exp(spline(q))

    def drho(q):
        q = base + np.mod(np.asarray(q, float) - base, 2 * np.pi)
        return np.exp(spline(q)) * spline(q, 1)

    return rho, drho
