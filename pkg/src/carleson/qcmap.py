"""Circle homeomorphisms, the Douady-Earle extension, Beltrami fields.

The barycentric extension is computed pointwise.  For ``w`` in the disk the
harmonic measure at ``w`` is the image of arc length under the disk
automorphism ``M_w(u) = (u + w) / (1 + conj(w) u)``, so the barycenter
equation

    F(zeta, w) = mean_t  (v - zeta) / (1 - conj(zeta) v),   v = h(M_w(e^{it}))

is integrated with the uniform trapezoid rule in ``t``.  This keeps the
quadrature accurate as ``|w| -> 1`` where the Poisson kernel in the original
angle becomes a spike.  The same substitution turns the ``w``-derivatives of
``F`` into plain averages, which gives ``zeta_w`` and ``zeta_wbar`` by
implicit differentiation.
"""

from __future__ import annotations

import json
from dataclasses import InitVar, dataclass
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicSpline, RegularGridInterpolator

from ._fourier import spectral_derivative
from .errors import ConvergenceError, NotQuasiconformalError, OutsideDomainError, ParameterError
from .geometry import JordanCurve, unit_circle
from .measure import Measure

TWO_PI = 2 * np.pi


def _uniform_theta(n: int) -> np.ndarray:
    return TWO_PI * np.arange(n) / n


@dataclass(frozen=True, eq=False)
class CircleHomeomorphism:
    """Orientation-preserving degree-one circle map through its lift ``H``.

    ``H(theta + 2pi) = H(theta) + 2pi``.  Samples live on a uniform grid of
    ``n`` angles; ``lift``/``dlift`` optionally give exact values elsewhere,
    otherwise a periodic cubic spline of ``H - theta`` is used.
    """

    theta: np.ndarray
    H: np.ndarray
    dH: np.ndarray
    lift: object = None
    dlift: object = None
    check: InitVar[bool] = True

    def __post_init__(self, check):
        if check:
            n = len(self.theta)
            if n < 8 or n & (n - 1):
                raise ParameterError("grid size must be a power of two")
            if np.any(np.diff(self.H) <= 0) or self.H[-1] >= self.H[0] + TWO_PI:
                raise ParameterError("lift is not strictly increasing")
            if np.any(self.dH < 0):
                raise ParameterError("negative derivative samples")

    @property
    def n(self) -> int:
        return len(self.theta)

    @classmethod
    def from_lift(cls, lift, dlift=None, n: int = 1024) -> "CircleHomeomorphism":
        th = _uniform_theta(n)
        H = np.asarray(lift(th), float)
        dH = np.asarray(dlift(th), float) if dlift is not None else 1 + spectral_derivative(H - th)
        return cls(th, H, dH, lift, dlift)

    @classmethod
    def from_samples(cls, H, dH=None) -> "CircleHomeomorphism":
        H = np.asarray(H, float)
        th = _uniform_theta(len(H))
        if dH is None:
            dH = 1 + spectral_derivative(H - th)
        return cls(th, H, np.asarray(dH, float))

    @classmethod
    def identity(cls, n: int = 1024) -> "CircleHomeomorphism":
        return cls.from_lift(lambda x: np.asarray(x, float), lambda x: np.ones_like(x), n)

    @classmethod
    def rotation(cls, angle: float, n: int = 1024) -> "CircleHomeomorphism":
        return cls.from_lift(lambda x: np.asarray(x, float) + angle, lambda x: np.ones_like(x), n)

    @classmethod
    def mobius(cls, a: complex, rot: float = 0.0, n: int = 1024) -> "CircleHomeomorphism":
        """Boundary trace of ``e^{i rot} (z + a) / (1 + conj(a) z)``."""
        a = complex(a)

        def lift(x):
            x = np.asarray(x, float)
            return x + rot + 2 * np.angle(1 + a * np.exp(-1j * x))

        def dlift(x):
            x = np.asarray(x, float)
            return (1 - abs(a) ** 2) / np.abs(1 + a.conjugate() * np.exp(1j * x)) ** 2

        return cls.from_lift(lift, dlift, n)

    @cached_property
    def _spline(self):
        x = np.append(self.theta, TWO_PI)
        y = np.append(self.H - self.theta, self.H[0])
        return CubicSpline(x, y, bc_type="periodic")

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, float)
        if self.lift is not None:
            return np.asarray(self.lift(x), float)
        return x + self._spline(np.mod(x, TWO_PI))

    def derivative(self, x) -> np.ndarray:
        x = np.asarray(x, float)
        if self.dlift is not None:
            return np.asarray(self.dlift(x), float)
        return 1 + self._spline(np.mod(x, TWO_PI), 1)

    def point(self, x) -> np.ndarray:
        """``h(e^{ix})`` as a point of the circle."""
        return np.exp(1j * self.evaluate(x))

    def compose(self, inner: "CircleHomeomorphism") -> "CircleHomeomorphism":
        """``self o inner``."""
        return CircleHomeomorphism.from_lift(
            lambda x: self.evaluate(inner.evaluate(x)),
            lambda x: self.derivative(inner.evaluate(x)) * inner.derivative(x),
            inner.n,
        )

    def to_dict(self) -> dict:
        return {"theta": self.theta.tolist(), "H": self.H.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "CircleHomeomorphism":
        th = np.asarray(d["theta"], float)
        if not np.allclose(th, _uniform_theta(len(th))):
            raise ParameterError("theta must be the uniform grid 2pi k/n")
        return cls.from_samples(d["H"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


# ---------------------------------------------------------------------------
# polar grids


def polar_grid(n_radii: int = 128, n_angles: int = 512, spacing: str = "chebyshev",
               r_max: float = 1.0):
    """Radii clustered toward ``r_max`` and uniform angles.

    ``chebyshev``: ``r_j = r_max sin(pi (j+1) / (2 n_radii))``, last ring on ``r_max``.
    ``log``: boundary distance ``1 - r`` geometric from 1/2 down to ``1 - r_max``.
    """
    if spacing == "chebyshev":
        radii = r_max * np.sin(np.pi * (np.arange(n_radii) + 1) / (2 * n_radii))
    elif spacing == "log":
        if r_max >= 1:
            raise ParameterError("log spacing needs r_max < 1")
        radii = 1 - np.geomspace(0.5, 1 - r_max, n_radii)
    else:
        raise ParameterError(f"unknown spacing {spacing!r}")
    return radii, _uniform_theta(n_angles)


# ---------------------------------------------------------------------------
# Douady-Earle


class DouadyEarleMap:
    """Pointwise Douady-Earle extension of a circle homeomorphism."""

    def __init__(self, h: CircleHomeomorphism, quad: int = 256, tol: float = 1e-13,
                 max_iter: int = 60, chunk: int = 2048):
        self.h = h
        self.quad = quad
        self.tol = tol
        self.max_iter = max_iter
        self.chunk = chunk
        self._u = np.exp(1j * _uniform_theta(quad))

    def _boundary_samples(self, w):
        u = self._u[None, :]
        e = (u + w[:, None]) / (1 + np.conj(w)[:, None] * u)
        return np.exp(1j * self.h.evaluate(np.angle(e)))

    @staticmethod
    def _residual(v, zeta):
        return ((v - zeta[:, None]) / (1 - np.conj(zeta)[:, None] * v)).mean(axis=1)

    def _newton(self, v, zeta):
        F = self._residual(v, zeta)
        trace = [float(np.abs(F).max())]
        for _ in range(self.max_iter):
            if trace[-1] < self.tol:
                break
            q = 1 - np.conj(zeta)[:, None] * v
            A = (-1 / q).mean(axis=1)
            B = ((v - zeta[:, None]) * v / q**2).mean(axis=1)
            R = -F
            step = (np.conj(A) * R - B * np.conj(R)) / (np.abs(A) ** 2 - np.abs(B) ** 2)
            s = np.ones(len(zeta))
            active = np.abs(F) >= self.tol
            for _ in range(40):
                trial = zeta + s * step
                good = (np.abs(trial) < 1) & active
                Ft = np.full(len(zeta), np.inf, complex)
                Ft[good] = self._residual(v[good], trial[good])
                worse = active & (np.abs(Ft) > np.abs(F))
                if not worse.any():
                    break
                s[worse] *= 0.5  # damping on residual increase
            upd = active & np.isfinite(Ft)
            zeta = np.where(upd, trial, zeta)
            F = np.where(upd, Ft, F)
            trace.append(float(np.abs(F).max()))
        return zeta, F, trace

    def solve(self, w, zeta0=None, raise_on_fail: bool = True):
        """Barycenter solve at the points ``w``; returns ``(zeta, residual)``."""
        w = np.atleast_1d(np.asarray(w, complex))
        if np.any(np.abs(w) >= 1):
            raise OutsideDomainError("Douady-Earle extension evaluated outside the open disk")
        zeta_out = np.empty_like(w)
        res_out = np.empty(len(w))
        for lo in range(0, len(w), self.chunk):
            ww = w[lo:lo + self.chunk]
            v = self._boundary_samples(ww)
            if zeta0 is None:
                z0 = v.mean(axis=1)
                z0 = np.where(np.abs(z0) < 0.999, z0, 0.999 * z0 / np.abs(z0))
            else:
                z0 = np.asarray(zeta0, complex)[lo:lo + self.chunk].copy()
            zeta, F, trace = self._newton(v, z0)
            zeta_out[lo:lo + self.chunk] = zeta
            res_out[lo:lo + self.chunk] = np.abs(F)
            # the attainable residual degrades like 1/(1 - |zeta|) near the circle
            limit = 1e3 * self.tol / np.maximum(1 - np.abs(zeta), 1e-6)
            if raise_on_fail and np.any(np.abs(F) > limit):
                raise ConvergenceError(f"barycenter Newton stalled at residual {np.abs(F).max():.3e}", trace)
        return zeta_out, res_out

    def __call__(self, w):
        w = np.asarray(w, complex)
        return self.solve(w.ravel())[0].reshape(w.shape)

    def invert(self, q, tol: float = 1e-12, max_iter: int = 50):
        """Preimages of ``q`` by Newton's method on the real-2D map, seeded at ``q``."""
        q = np.atleast_1d(np.asarray(q, complex)).ravel()
        z = q.copy()
        trace = []
        for _ in range(max_iter):
            val, a, b = self.wirtinger(z)
            R = q - val
            step = (np.conj(a) * R - b * np.conj(R)) / (np.abs(a) ** 2 - np.abs(b) ** 2)
            new = z + step
            out = np.abs(new) >= 1
            new[out] = z[out] + 0.5 * (1 - np.abs(z[out])) * step[out] / np.abs(step[out])
            z = new
            trace.append(float(np.abs(R).max()))
            if trace[-1] < tol:
                return z
        raise ConvergenceError("Douady-Earle inverse did not converge", trace)

    def wirtinger(self, w):
        """``(zeta, zeta_w, zeta_wbar)`` at the points ``w``."""
        w = np.atleast_1d(np.asarray(w, complex)).ravel()
        zeta, _ = self.solve(w)
        dz = np.empty_like(w)
        dzb = np.empty_like(w)
        u = self._u[None, :]
        for lo in range(0, len(w), self.chunk):
            ww, zz = w[lo:lo + self.chunk], zeta[lo:lo + self.chunk]
            v = self._boundary_samples(ww)
            q = 1 - np.conj(zz)[:, None] * v
            g = (v - zz[:, None]) / q
            A = (-1 / q).mean(axis=1)
            B = ((v - zz[:, None]) * v / q**2).mean(axis=1)
            scale = 1 - np.abs(ww) ** 2
            Cw = (g * np.conj(u)).mean(axis=1) / scale
            Dw = (g * u).mean(axis=1) / scale
            zw = (B * np.conj(Dw) - np.conj(A) * Cw) / (np.abs(A) ** 2 - np.abs(B) ** 2)
            dz[lo:lo + self.chunk] = zw
            dzb[lo:lo + self.chunk] = -(B * np.conj(zw) + Dw) / A
        return zeta, dz, dzb


@dataclass(frozen=True, eq=False)
class QCGridMap:
    """Map of the disk sampled on a polar grid, ``values[i, k]`` at ``radii[i] e^{i angles[k]}``."""

    radii: np.ndarray
    angles: np.ndarray
    values: np.ndarray
    trace: CircleHomeomorphism | None = None
    evaluator: object = None
    residual: float = 0.0

    @property
    def points(self) -> np.ndarray:
        return self.radii[:, None] * np.exp(1j * self.angles[None, :])

    @cached_property
    def _interp(self):
        ang = np.append(self.angles, TWO_PI)
        vals = np.concatenate([self.values, self.values[:, :1]], axis=1)
        re = RegularGridInterpolator((self.radii, ang), vals.real)
        im = RegularGridInterpolator((self.radii, ang), vals.imag)
        return re, im

    def __call__(self, z):
        z = np.asarray(z, complex)
        if self.evaluator is not None:
            return self.evaluator(z)
        r = np.clip(np.abs(z), self.radii[0], self.radii[-1])
        th = np.mod(np.angle(z), TWO_PI)
        re, im = self._interp
        pts = np.stack([r.ravel(), th.ravel()], axis=1)
        return (re(pts) + 1j * im(pts)).reshape(z.shape)

    def wirtinger_fd(self):
        """``(f_z, f_zbar)`` on the grid: radial centred differences (one-sided
        at the ends), spectral differentiation in angle."""
        f = self.values
        fr = np.gradient(f, self.radii, axis=0)
        n = len(self.angles)
        k = np.fft.fftfreq(n, 1.0 / n)
        if n % 2 == 0:
            k[n // 2] = 0
        ft = np.fft.ifft(1j * k[None, :] * np.fft.fft(f, axis=1), axis=1)
        r = self.radii[:, None]
        e = np.exp(1j * self.angles)[None, :]
        fz = 0.5 * np.conj(e) * (fr - 1j * ft / r)
        fzb = 0.5 * e * (fr + 1j * ft / r)
        return fz, fzb

    def jacobian(self) -> np.ndarray:
        fz, fzb = self.wirtinger_fd()
        return np.abs(fz) ** 2 - np.abs(fzb) ** 2


def sample_grid_map(f, n_radii: int = 128, n_angles: int = 512, **grid) -> QCGridMap:
    """Sample an explicit map ``f`` (e.g. a linear or Mobius test map) on the polar grid."""
    radii, angles = polar_grid(n_radii, n_angles, **grid)
    pts = radii[:, None] * np.exp(1j * angles[None, :])
    return QCGridMap(radii, angles, np.asarray(f(pts), complex), evaluator=f)


def douady_earle(h: CircleHomeomorphism, n_radii: int = 128, n_angles: int = 512,
                 quad: int = 256, tol: float = 1e-13) -> QCGridMap:
    """Douady-Earle extension of ``h`` on the default polar grid.

    Rings are solved from the center outward, each seeded with the previous
    ring's solution.  The outer ring ``r = 1`` carries the boundary values of
    ``h``.  Raises :class:`ConvergenceError` with the Newton trace if a ring
    does not converge.
    """
    if np.any(np.diff(h.H) <= 0):
        raise ParameterError("input lift is not monotone")
    radii, angles = polar_grid(n_radii, n_angles)
    de = DouadyEarleMap(h, quad=quad, tol=tol)
    e = np.exp(1j * angles)
    values = np.empty((n_radii, n_angles), complex)
    prev = None
    worst = 0.0
    for i, r in enumerate(radii):
        if r >= 1:
            values[i] = h.point(angles)
            continue
        zeta, res = de.solve(r * e, prev)
        values[i] = zeta
        prev = zeta
        worst = max(worst, float(res.max()))
    return QCGridMap(radii, angles, values, trace=h, evaluator=de, residual=worst)


# ---------------------------------------------------------------------------
# Beltrami coefficients


@dataclass(frozen=True, eq=False)
class BeltramiField:
    radii: np.ndarray
    angles: np.ndarray
    values: np.ndarray

    @classmethod
    def from_function(cls, mu, radii, angles) -> "BeltramiField":
        radii, angles = np.asarray(radii, float), np.asarray(angles, float)
        pts = radii[:, None] * np.exp(1j * angles[None, :])
        vals = np.broadcast_to(np.asarray(mu(pts), complex), pts.shape).copy()
        return cls(radii, angles, vals)

    @property
    def sup_norm(self) -> float:
        return float(np.abs(self.values).max())

    def to_dict(self) -> dict:
        return {
            "shape": list(self.values.shape),
            "radii": self.radii.tolist(),
            "angles": self.angles.tolist(),
            "re": self.values.real.tolist(),
            "im": self.values.imag.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BeltramiField":
        vals = np.asarray(d["re"], float) + 1j * np.asarray(d["im"], float)
        if list(vals.shape) != list(d["shape"]):
            raise ParameterError("grid shape metadata does not match values")
        return cls(np.asarray(d["radii"], float), np.asarray(d["angles"], float), vals)


def beltrami_of(gm: QCGridMap, check: bool = True) -> BeltramiField:
    """``mu = f_zbar / f_z`` from grid differences of ``gm``.

    With ``check`` a cell with ``|mu| >= 1`` or non-positive Jacobian raises
    :class:`NotQuasiconformalError`.
    """
    fz, fzb = gm.wirtinger_fd()
    mu = fzb / fz
    if check:
        bad = ~(np.abs(mu) < 1)
        if bad.any():
            i, k = np.argwhere(bad)[0]
            raise NotQuasiconformalError(
                f"|mu| = {abs(mu[i, k]):.4f} at r={gm.radii[i]:.4f}, theta={gm.angles[k]:.4f}")
    return BeltramiField(gm.radii, gm.angles, mu)


def beltrami_compose(mu_f, nu_at_image, tau):
    """Dilatation of ``s o f`` from ``mu_f``, ``nu = mu_s(f(z))`` and ``tau = conj(f_z)/f_z``."""
    mu = np.asarray(mu_f, complex)
    nu = np.asarray(nu_at_image, complex)
    return (mu + nu * tau) / (1 + np.conj(mu) * nu * tau)


def beltrami_carleson(field: BeltramiField, domain: JordanCurve | None = None) -> Measure:
    """Cell-center discretisation of ``|mu|^2 / (1 - |z|^2) dx dy``.

    Cells lie between consecutive grid rings; the cell value is the mean of
    its four corner values.  Cells touching ``|z| = 1`` are dropped.
    """
    r, a, mu = field.radii, field.angles, field.values
    domain = unit_circle(512) if domain is None else domain
    m2 = np.abs(mu) ** 2
    corner = 0.25 * (m2[:-1] + m2[1:] + np.roll(m2[:-1], -1, axis=1) + np.roll(m2[1:], -1, axis=1))
    keep = r[1:] < 1
    r0, r1 = r[:-1][keep], r[1:][keep]
    dth = TWO_PI / len(a)
    rm = 0.5 * (r0 + r1)
    centers = rm[:, None] * np.exp(1j * (a[None, :] + dth / 2))
    areas = 0.5 * (r1**2 - r0**2)[:, None] * dth * np.ones(len(a))[None, :]
    dens = corner[keep] / (1 - np.abs(centers) ** 2)
    pts, w = [centers.ravel()], [(dens * areas).ravel()]
    if r[0] > 0:
        pts.append(np.array([0j]))
        w.append(np.array([m2[0].mean() * np.pi * r[0] ** 2]))
    return Measure(np.concatenate(pts), np.concatenate(w), domain, validate=False)


# ---------------------------------------------------------------------------
# Poincare metric


def poincare_distance(z, w) -> np.ndarray:
    z, w = np.asarray(z, complex), np.asarray(w, complex)
    x = np.abs(z - w) / np.abs(1 - np.conj(z) * w)
    return 2 * np.arctanh(np.minimum(x, 1.0))


@dataclass(frozen=True)
class BiLipschitzReport:
    constant: float
    worst_pair: tuple[complex, complex]
    ratio_range: tuple[float, float]


def random_pairs(rng: np.random.Generator, count: int, r_max: float = 0.99) -> np.ndarray:
    """``count`` point pairs in ``|z| <= r_max``: half independent, half hyperbolically close."""
    def disk(k):
        return r_max * np.sqrt(rng.random(k)) * np.exp(TWO_PI * 1j * rng.random(k))

    far = count // 2
    near = count - far
    a = disk(count)
    b = np.empty(count, complex)
    b[:far] = disk(far)
    z = a[far:]
    step = np.tanh(0.5 * rng.uniform(0.01, 1.0, near)) * np.exp(TWO_PI * 1j * rng.random(near))
    cand = (step + z) / (1 + np.conj(z) * step)
    cand = np.where(np.abs(cand) <= r_max, cand, z * (1 - 1e-3))
    b[far:] = cand
    return np.stack([a, b], axis=1)


def poincare_bilipschitz(fmap, point_pairs) -> BiLipschitzReport:
    """Max of ``max(ratio, 1/ratio)`` over pairs, ratio = ``d(f(p), f(q)) / d(p, q)``."""
    pairs = np.asarray(point_pairs, complex).reshape(-1, 2)
    if np.any(np.abs(pairs) > 0.99 + 1e-12):
        raise ParameterError("pairs must lie in |z| <= 0.99")
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    img = np.asarray(fmap(pairs.ravel()), complex).reshape(pairs.shape)
    if np.any(np.abs(img) >= 1):
        raise OutsideDomainError("image point outside the unit disk")
    ratio = poincare_distance(img[:, 0], img[:, 1]) / poincare_distance(pairs[:, 0], pairs[:, 1])
    worst = np.maximum(ratio, 1 / ratio)
    k = int(np.argmax(worst))
    return BiLipschitzReport(float(worst[k]), (complex(pairs[k, 0]), complex(pairs[k, 1])),
                             (float(ratio.min()), float(ratio.max())))


# ---------------------------------------------------------------------------
# transport of densities by quasiconformal self-maps of the disk


def _wirtinger(qc, w):
    w = np.asarray(w, complex)
    if hasattr(qc, "wirtinger"):
        return qc.wirtinger(w)
    return qc(w), qc.deriv(w), np.zeros_like(w)


def qc_transport_atoms(m: Measure, qc, direction: str = "pull") -> Measure:
    """Atom form of :func:`qc_transport`.

    ``push``: ``(p, w) -> (qc(p), w |qc_z(p)|)``; ``pull``: ``(q, w) -> (z, w |qc_z(z)| / J(z))``
    with ``z = qc^{-1}(q)`` and ``J = |qc_z|^2 - |qc_zbar|^2``.  Both agree
    with the density law on cell-center discretisations.
    """
    if direction == "push":
        val, a, _ = _wirtinger(qc, m.points)
        return Measure(val, m.weights * np.abs(a), m.domain, validate=False)
    if direction == "pull":
        z = qc.invert(m.points)
        _, a, b = _wirtinger(qc, z)
        jac = np.abs(a) ** 2 - np.abs(b) ** 2
        return Measure(z, m.weights * np.abs(a) / jac, m.domain, validate=False)
    raise ParameterError("direction must be 'pull' or 'push'")


def qc_transport(density, cells, qc, direction: str = "pull", domain: JordanCurve | None = None) -> Measure:
    """Discretise the image of ``density dx dy`` under a quasiconformal self-map ``qc`` of the disk.

    ``pull``: ``density(qc(z)) |d qc(z)| dx dy`` with atoms at the cell centers.
    ``push``: ``density(qc^{-1}(w)) |d qc^{-1}(w)| du dv``, atoms at the image
    centers with weight ``density(c) |qc_z(c)| area(c)``.
    """
    domain = unit_circle(512) if domain is None else domain
    val, dz, _ = _wirtinger(qc, cells.centers)
    if direction == "pull":
        w = np.asarray(density(val), float) * np.abs(dz) * cells.areas
        return Measure(cells.centers, w, domain, validate=False)
    if direction == "push":
        w = np.asarray(density(cells.centers), float) * np.abs(dz) * cells.areas
        return Measure(val, w, domain, validate=False)
    raise ParameterError("direction must be 'pull' or 'push'")
