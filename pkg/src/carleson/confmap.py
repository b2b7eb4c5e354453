"""Univalent maps of the disk (or its exterior), transport of measures, welding.

Every map returns its first three derivatives so the Schwarzian can be
formed analytically.  Numerical maps come from Theodorsen's fixed-point
iteration for star-like curves: with ``rho`` the polar radius of the target
curve, the boundary correspondence ``Theta(phi)`` solves

    Theta = phi + K[log rho(Theta)]

where ``K`` is the conjugate-function operator on the circle.  The interior
map is then ``f(z) = z exp(F(z))`` with ``F`` the holomorphic extension of
``log rho(Theta) + i (Theta - phi)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.spatial import cKDTree

from ._fourier import conjugate_function, spectral_derivative, trig_coefficients, trig_eval
from .errors import ConvergenceError, DomainMismatchError, OutsideDomainError, ParameterError
from .geometry import JordanCurve, distances_to_curve, generate_curve, polar_radius, unit_circle
from .measure import Measure
from .qcmap import CircleHomeomorphism

TWO_PI = 2 * np.pi
_EDGE = 1e-12  # slack on the closed-disk domain test


def _arr(z) -> np.ndarray:
    return np.asarray(z, dtype=complex)


class ConformalMap:
    """Base class: ``evaluate``, ``deriv``, ``derivatives``, ``invert``.

    ``direction`` is ``"disk"`` for maps of the unit disk onto a bounded
    domain and ``"exterior"`` for maps of ``|z| > 1`` onto an exterior
    domain fixing infinity.
    """

    kind = "abstract"
    direction = "disk"

    # subclasses: _eval(z), _derivs(z) -> (f1, f2, f3), optionally _inverse(w)

    def params(self) -> dict:
        return {}

    def descriptor(self) -> dict:
        return {"kind": self.kind, "params": self.params()}

    def to_json(self) -> str:
        return json.dumps(self.descriptor(), sort_keys=True)

    def in_domain(self, z) -> np.ndarray:
        r = np.abs(_arr(z))
        return r <= 1 + _EDGE if self.direction == "disk" else r >= 1 - _EDGE

    def _check(self, z) -> np.ndarray:
        z = _arr(z)
        if not np.all(self.in_domain(z)):
            where = "closed unit disk" if self.direction == "disk" else "exterior of the unit disk"
            raise OutsideDomainError(f"{self.kind} map evaluated outside the {where}")
        return z

    def evaluate(self, z):
        return self._eval(self._check(z))

    __call__ = evaluate

    def deriv(self, z):
        return self._derivs(self._check(z))[0]

    def derivatives(self, z):
        """``(f, f', f'', f''')`` at ``z``."""
        z = self._check(z)
        return (self._eval(z),) + tuple(self._derivs(z))

    def invert(self, w):
        w = _arr(w)
        if hasattr(self, "_inverse"):
            z = self._inverse(w)
        else:
            z = self._newton_invert(w)
        if not np.all(self.in_domain(z)):
            raise OutsideDomainError(f"point not in the image of the {self.kind} map")
        return z

    # -- numerical inverse -------------------------------------------------

    def _seed_grid(self):
        if getattr(self, "_tree", None) is None:
            th = TWO_PI * np.arange(512) / 512
            r = np.sin(np.pi * (np.arange(96) + 1) / 192)
            if self.direction == "exterior":
                r = 1 / r
            else:
                r = np.concatenate([[0.0], r])
            pts = (r[:, None] * np.exp(1j * th)[None, :]).ravel()
            img = self._eval(pts)
            self._tree = cKDTree(np.column_stack([img.real, img.imag]))
            self._tree_pts = pts
        return self._tree, self._tree_pts

    def _newton_invert(self, w, max_iter: int = 50):
        """Newton's method seeded at the nearest forward-grid sample."""
        flat = w.ravel()
        tree, pts = self._seed_grid()
        _, idx = tree.query(np.column_stack([flat.real, flat.imag]))
        z = pts[idx].copy()
        tol = 1e-14 * (1 + np.abs(flat))
        trace = []
        done = np.zeros(len(flat), bool)
        for _ in range(max_iter):
            act = ~done
            if not act.any():
                break
            za = z[act]
            step = (self._eval(za) - flat[act]) / self._derivs(za)[0]
            new = za - step
            # stay in the domain: pull escaping iterates half way back
            r_old, r_new = np.abs(za), np.abs(new)
            if self.direction == "disk":
                out = r_new >= 1
                new[out] = za[out] + 0.5 * (1 - r_old[out]) * (-step[out] / np.abs(step[out]))
            else:
                out = r_new <= 1
                new[out] = za[out] * (1 + 0.5 * (r_old[out] - 1)) / r_old[out]
            z[act] = new
            trace.append(float(np.abs(step).max()))
            done[act] = np.abs(step) <= tol[act] * 10 + 1e-15 * np.abs(new)
        else:
            if not done.all():
                raise ConvergenceError(f"{self.kind} inverse: Newton did not converge in {max_iter} steps", trace)
        # one polishing step
        z = z - (self._eval(z) - flat) / self._derivs(z)[0]
        return z.reshape(w.shape)

    # -- image geometry -----------------------------------------------------

    def image_curve(self, n: int = 1024) -> JordanCurve | None:
        return None

    def boundary_distance(self, w) -> np.ndarray:
        """Distance from image points to the image boundary."""
        curve = self.image_curve(4096)
        if curve is None:
            raise ParameterError(f"image curve of the {self.kind} map is unavailable")
        return distances_to_curve(_arr(w).ravel(), curve).reshape(np.shape(w))


class Mobius(ConformalMap):
    """Disk automorphism ``e^{i rot} (z + a) / (1 + conj(a) z)``."""

    kind = "mobius"

    def __init__(self, a: complex = 0.0, rot: float = 0.0):
        a = complex(a)
        if not abs(a) < 1:
            raise ParameterError("mobius needs |a| < 1")
        self.a, self.rot = a, float(rot)
        self._e = np.exp(1j * self.rot)

    def params(self):
        return {"a": [self.a.real, self.a.imag], "rot": self.rot}

    def _eval(self, z):
        return self._e * (z + self.a) / (1 + np.conj(self.a) * z)

    def _derivs(self, z):
        q = 1 + np.conj(self.a) * z
        ab = np.conj(self.a)
        f1 = self._e * (1 - abs(self.a) ** 2) / q**2
        return f1, -2 * ab * f1 / q, 6 * ab**2 * f1 / q**2

    def _inverse(self, w):
        u = w / self._e
        return (u - self.a) / (1 - np.conj(self.a) * u)

    def image_curve(self, n=1024):
        return unit_circle(n)


class PolyMap(ConformalMap):
    """``z + c z^2``, univalent on the disk for ``|c| < 1/2``."""

    kind = "polymap"

    def __init__(self, c: complex):
        c = complex(c)
        if not abs(c) < 0.5:
            raise ParameterError("polymap needs |c| < 1/2")
        self.c = c

    def params(self):
        return {"c": [self.c.real, self.c.imag]}

    def _eval(self, z):
        return z + self.c * z**2

    def _derivs(self, z):
        return 1 + 2 * self.c * z, np.full(z.shape, 2 * self.c), np.zeros(z.shape, complex)

    def _inverse(self, w):
        if self.c == 0:
            return w.copy()
        # principal root: 1 + 2cz has positive real part on the disk
        return (np.sqrt(1 + 4 * self.c * w) - 1) / (2 * self.c)

    def image_curve(self, n=1024):
        return generate_curve("polyimage", n, c=self.c)


class Lens(ConformalMap):
    """``(u - 1)/(u + 1)`` with ``u = ((1 + z)/(1 - z))^alpha``; corners of angle ``alpha pi`` at +-1."""

    kind = "lens"

    def __init__(self, alpha: float):
        if not 0 < alpha < 2:
            raise ParameterError("lens needs 0 < alpha < 2")
        self.alpha = float(alpha)

    def params(self):
        return {"alpha": self.alpha}

    def _u(self, z):
        return ((1 + z) / (1 - z)) ** self.alpha

    def _eval(self, z):
        u = self._u(z)
        return (u - 1) / (u + 1)

    def _derivs(self, z):
        a = self.alpha
        u = self._u(z)
        s = 1 - z**2
        L = 2 * a / s
        L1 = 4 * a * z / s**2
        L2 = 4 * a * (1 + 3 * z**2) / s**3
        u1 = u * L
        u2 = u * (L**2 + L1)
        u3 = u * (L**3 + 3 * L * L1 + L2)
        m1 = 2 / (u + 1) ** 2
        m2 = -4 / (u + 1) ** 3
        m3 = 12 / (u + 1) ** 4
        return m1 * u1, m2 * u1**2 + m1 * u2, m3 * u1**3 + 3 * m2 * u1 * u2 + m1 * u3

    def _inverse(self, w):
        s = ((1 + w) / (1 - w)) ** (1 / self.alpha)
        return (s - 1) / (s + 1)

    def image_curve(self, n=1024):
        return generate_curve("lens", n, alpha=self.alpha)


class Koebe(ConformalMap):
    """Koebe function ``z / (1 - z)^2`` onto the plane slit along ``(-inf, -1/4]``."""

    kind = "koebe"

    def _eval(self, z):
        return z / (1 - z) ** 2

    def _derivs(self, z):
        q = 1 - z
        return (1 + z) / q**3, (4 + 2 * z) / q**4, (18 + 6 * z) / q**5

    def _inverse(self, w):
        out = np.zeros(w.shape, complex)
        nz = w != 0
        ww = w[nz]
        root = np.sqrt(4 * ww + 1)
        z1 = ((2 * ww + 1) - root) / (2 * ww)
        z2 = ((2 * ww + 1) + root) / (2 * ww)
        out[nz] = np.where(np.abs(z1) <= np.abs(z2), z1, z2)
        return out

    def boundary_distance(self, w):
        w = _arr(w)
        on_left = w.real <= -0.25
        return np.where(on_left, np.abs(w.imag), np.abs(w + 0.25))


class EllipseExterior(ConformalMap):
    """``z + c/z`` from ``|z| > 1`` onto the exterior of an ellipse."""

    kind = "ellipse_exterior"
    direction = "exterior"

    def __init__(self, c: float):
        if not abs(c) < 1:
            raise ParameterError("ellipse_exterior needs |c| < 1")
        self.c = float(c)

    def params(self):
        return {"c": self.c}

    def _eval(self, z):
        return z + self.c / z

    def _derivs(self, z):
        c = self.c
        return 1 - c / z**2, 2 * c / z**3, -6 * c / z**4

    def _inverse(self, w):
        root = np.sqrt(w**2 - 4 * self.c)
        z1, z2 = (w + root) / 2, (w - root) / 2
        return np.where(np.abs(z1) >= np.abs(z2), z1, z2)

    def image_curve(self, n=1024):
        return generate_curve("ellipse", n, c=self.c)


class Composite(ConformalMap):
    """``outer o inner``; derivatives by the chain rule."""

    kind = "composite"

    def __init__(self, outer: ConformalMap, inner: ConformalMap):
        self.outer, self.inner = outer, inner
        self.direction = inner.direction

    def params(self):
        return {"outer": self.outer.descriptor(), "inner": self.inner.descriptor()}

    def _eval(self, z):
        return self.outer.evaluate(self.inner._eval(z))

    def _derivs(self, z):
        g0 = self.inner._eval(z)
        g1, g2, g3 = self.inner._derivs(z)
        f1, f2, f3 = self.outer._derivs(g0)
        return f1 * g1, f2 * g1**2 + f1 * g2, f3 * g1**3 + 3 * f2 * g1 * g2 + f1 * g3

    def _inverse(self, w):
        return self.inner.invert(self.outer.invert(w))

    def image_curve(self, n=1024):
        return self.outer.image_curve(n)


# ---------------------------------------------------------------------------
# Theodorsen


@dataclass
class TheodorsenResult:
    phi: np.ndarray
    theta: np.ndarray
    history: list = field(default_factory=list)
    epsilon: float = 0.0

    @property
    def residual(self) -> float:
        return self.history[-1] if self.history else 0.0

    @property
    def iterations(self) -> int:
        return len(self.history)


def _epsilon(rho, drho, n: int = 8192) -> float:
    psi = TWO_PI * np.arange(n) / n
    return float(np.max(np.abs(drho(psi) / rho(psi))))


def theodorsen_correspondence(rho, drho, n: int = 1024, tol: float = 1e-12,
                              max_iter: int = 500) -> TheodorsenResult:
    """Boundary correspondence ``phi -> Theta(phi)`` for the polar curve ``rho``.

    Raises :class:`ParameterError` when ``eps = max |rho'/rho| >= 1`` and
    :class:`ConvergenceError` (with the residual history) if ``tol`` is not
    reached in ``max_iter`` steps.
    """
    if n < 8 or n & (n - 1):
        raise ParameterError("sample count must be a power of two")
    eps = _epsilon(rho, drho)
    if not eps < 1:
        raise ParameterError(f"epsilon condition fails: max|rho'/rho| = {eps:.3f} >= 1")
    phi = TWO_PI * np.arange(n) / n
    theta = phi.copy()
    history = []
    for _ in range(max_iter):
        new = phi + conjugate_function(np.log(rho(theta)))
        res = float(np.abs(new - theta).max())
        theta = new
        history.append(res)
        if res < tol:
            return TheodorsenResult(phi, theta, history, eps)
    raise ConvergenceError(f"Theodorsen iteration stalled at residual {history[-1]:.3e}", history)


def _taylor(g: np.ndarray) -> np.ndarray:
    """Nonnegative-frequency coefficients of periodic samples, tail trimmed."""
    n = len(g)
    a = np.fft.fft(g)[: n // 2] / n
    big = np.flatnonzero(np.abs(a) > 1e-17 * max(1.0, np.abs(a).max()))
    return a[: big[-1] + 1] if len(big) else a[:1]


class TheodorsenMap(ConformalMap):
    """Numerical Riemann map of a star-like curve from its boundary correspondence.

    Interior direction: ``f(z) = z exp(F(z))`` with ``F(z) = sum a_k z^k``.
    Exterior direction: ``g(z) = z exp(-conj(F~)(1/z))`` where ``F~`` is the
    interior series for the inverted curve of radius ``1/rho``.
    """

    kind = "theodorsen"

    def __init__(self, curve: JordanCurve, result: TheodorsenResult, rho, direction: str = "disk"):
        self.curve = curve
        self.result = result
        self.rho = rho
        self.direction = direction
        r = rho(result.theta)
        g = np.log(r) + 1j * (result.theta - result.phi)
        self.coef = _taylor(g)
        self._tree = None

    @property
    def table(self) -> np.ndarray:
        return np.column_stack([self.result.phi, self.result.theta])

    def params(self):
        return {
            "curve": self.curve.to_dict() if self.curve.family == "custom" else self.curve.descriptor(),
            "direction": self.direction,
            "table": self.table.tolist(),
        }

    def _series(self, z):
        """``(F, F', F'', F''')`` of the exponent at ``z``."""
        a = self.coef
        k = np.arange(len(a))
        if self.direction == "disk":
            F0 = P.polyval(z, a)
            F1 = P.polyval(z, P.polyder(a, 1)) if len(a) > 1 else np.zeros_like(z)
            F2 = P.polyval(z, P.polyder(a, 2)) if len(a) > 2 else np.zeros_like(z)
            F3 = P.polyval(z, P.polyder(a, 3)) if len(a) > 3 else np.zeros_like(z)
            return F0, F1, F2, F3
        b = -np.conj(a)
        w = 1 / z
        F0 = P.polyval(w, b)
        F1 = -w * P.polyval(w, k * b)
        F2 = w**2 * P.polyval(w, k * (k + 1) * b)
        F3 = -(w**3) * P.polyval(w, k * (k + 1) * (k + 2) * b)
        return F0, F1, F2, F3

    def _eval(self, z):
        return z * np.exp(self._series(z)[0])

    def _derivs(self, z):
        F0, F1, F2, F3 = self._series(z)
        E = np.exp(F0)
        E1 = E * F1
        E2 = E * (F2 + F1**2)
        E3 = E * (F3 + 3 * F1 * F2 + F1**3)
        return E + z * E1, 2 * E1 + z * E2, 3 * E2 + z * E3

    def image_curve(self, n=1024):
        if n == self.curve.n:
            return self.curve
        return generate_curve(self.curve.family, n, **self.curve.params) \
            if self.curve.family != "custom" else self.curve


def theodorsen_map(curve: JordanCurve, tol: float = 1e-12, max_iter: int = 500,
                   n: int | None = None, exterior: bool = False) -> TheodorsenMap:
    """Conformal map of the disk onto the interior of a star-like curve.

    With ``exterior=True`` the map sends ``|z| > 1`` onto the exterior
    instead, by running the iteration on the inverted curve ``w -> 1/conj(w)``.
    """
    rho, drho = polar_radius(curve)
    n = curve.n if n is None else n
    if exterior:
        def r_in(psi):
            return 1 / rho(psi)

        def dr_in(psi):
            return -drho(psi) / rho(psi) ** 2

        res = theodorsen_correspondence(r_in, dr_in, n, tol, max_iter)
        return TheodorsenMap(curve, res, r_in, "exterior")
    res = theodorsen_correspondence(rho, drho, n, tol, max_iter)
    return TheodorsenMap(curve, res, rho, "disk")


# ---------------------------------------------------------------------------
# Koebe bounds


@dataclass(frozen=True)
class KoebeReport:
    passed: bool
    lower: np.ndarray
    distance: np.ndarray
    upper: np.ndarray
    failures: np.ndarray

    @property
    def worst_lower_ratio(self) -> float:
        """``min d / lower`` over points (>= 1 when the lower bound holds)."""
        return float(np.min(self.distance / self.lower))


def koebe_bounds_check(fmap: ConformalMap, points, rtol: float = 1e-6) -> KoebeReport:
    """Check ``(1-|z|^2)|f'(z)|/4 <= d_f(z) <= (1-|z|^2)|f'(z)|`` at each point.

    ``d_f`` is the distance from ``f(z)`` to the image boundary; ``rtol``
    absorbs the polyline error of sampled image curves.
    """
    z = _arr(points).ravel()
    if np.any(np.abs(z) >= 1):
        raise OutsideDomainError("Koebe bounds need points in the open disk")
    w, f1 = fmap.evaluate(z), fmap.deriv(z)
    upper = (1 - np.abs(z) ** 2) * np.abs(f1)
    lower = 0.25 * upper
    d = fmap.boundary_distance(w)
    ok = (d >= lower * (1 - rtol)) & (d <= upper * (1 + rtol))
    return KoebeReport(bool(ok.all()), lower, d, upper, np.flatnonzero(~ok))


# ---------------------------------------------------------------------------
# transport


def _base_circle(m: Measure) -> JordanCurve:
    return m.domain if m.domain.is_unit_circle else unit_circle(512)


def pull_back(m: Measure, fmap: ConformalMap, domain: JordanCurve | None = None) -> Measure:
    """Atom ``(q, w) -> (f^{-1}(q), w / |f'(f^{-1}(q))|)``; result lives on the unit circle."""
    z = fmap.invert(m.points)
    w = m.weights / np.abs(fmap.deriv(z))
    domain = unit_circle(512) if domain is None else domain
    return Measure(z, w, domain, exterior=fmap.direction == "exterior", validate=False)


def push_forward(m: Measure, fmap: ConformalMap, domain: JordanCurve | None = None) -> Measure:
    """Atom ``(p, w) -> (f(p), w |f'(p)|)`` onto the image domain of ``fmap``."""
    if not m.domain.is_unit_circle:
        raise DomainMismatchError("push_forward expects a measure on the unit disk")
    if domain is None:
        domain = fmap.image_curve(1024)
        if domain is None:
            raise ParameterError(f"image curve of the {fmap.kind} map is unavailable")
    w = m.weights * np.abs(fmap.deriv(m.points))
    return Measure(fmap.evaluate(m.points), w, domain, exterior=m.exterior, validate=False)


def pull_back_density(density, cells, fmap: ConformalMap, domain: JordanCurve | None = None) -> Measure:
    """Density form ``lambda(f(z)) |f'(z)| dx dy`` sampled on disk cells."""
    w = np.asarray(density(fmap.evaluate(cells.centers)), float) * np.abs(fmap.deriv(cells.centers)) * cells.areas
    return Measure(cells.centers, w, unit_circle(512) if domain is None else domain, validate=False)


# ---------------------------------------------------------------------------
# welding


@dataclass(frozen=True)
class WeldingResult:
    h: CircleHomeomorphism
    residual: float
    normalization: str = "H(0) = 0"
    interior: TheodorsenResult | None = None
    exterior_theta: np.ndarray | None = None


def _invert_lift(phi: np.ndarray, theta: np.ndarray, y: np.ndarray, tol: float = 1e-14) -> np.ndarray:
    """Solve ``Theta(x) = y`` for the trig interpolant of ``Theta - phi``."""
    coef = trig_coefficients(theta - phi)
    x = y.copy()
    for _ in range(60):
        step = (x + trig_eval(coef, x) - y) / (1 + trig_eval(coef, x, 1))
        x -= step
        if np.abs(step).max() < tol:
            break
    else:
        raise ConvergenceError("inverse of the boundary correspondence did not converge", [float(np.abs(step).max())])
    return x


def welding(curve: JordanCurve, exterior_map: ConformalMap | None = None, n: int | None = None,
            tol: float = 1e-12) -> WeldingResult:
    """Welding homeomorphism ``h = Theta_in^{-1} o Theta_out`` of a star-like curve.

    ``Theta_in`` is the interior Theodorsen correspondence.  ``Theta_out`` is
    the polar angle of the exterior map on the circle: from ``exterior_map``
    when given (the ellipse family uses ``z + c/z`` by default), otherwise
    from Theodorsen on the inverted curve.  The lift is normalised by
    ``H(0) = 0``.
    """
    n = curve.n if n is None else n
    rho, drho = polar_radius(curve)
    inner = theodorsen_correspondence(rho, drho, n, tol)
    phi = inner.phi
    if exterior_map is None and curve.family == "ellipse":
        exterior_map = EllipseExterior(curve.params["c"])
    if exterior_map is not None:
        pts = exterior_map.evaluate(np.exp(1j * phi))
        theta_out = np.unwrap(np.angle(pts))
        res_out = 0.0
    else:
        outer = theodorsen_correspondence(lambda p: 1 / rho(p), lambda p: -drho(p) / rho(p) ** 2, n, tol)
        theta_out = outer.theta
        res_out = outer.residual
    H = _invert_lift(phi, inner.theta, theta_out)
    coef = trig_coefficients(inner.theta - phi)
    mismatch = float(np.abs(H + trig_eval(coef, H) - theta_out).max())
    H = H - H[0]
    dH = 1 + spectral_derivative(H - phi)
    h = CircleHomeomorphism(phi, H, dH)
    return WeldingResult(h, max(inner.residual, res_out, mismatch), "H(0) = 0", inner, theta_out)


# ---------------------------------------------------------------------------
# descriptors


def map_from_descriptor(d: dict) -> ConformalMap:
    kind, p = d["kind"], d.get("params", {})

    def cplx(v):
        return complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v)

    if kind == "mobius":
        return Mobius(cplx(p.get("a", 0.0)), p.get("rot", 0.0))
    if kind == "polymap":
        return PolyMap(cplx(p["c"]))
    if kind == "lens":
        return Lens(p["alpha"])
    if kind == "koebe":
        return Koebe()
    if kind == "ellipse_exterior":
        return EllipseExterior(p["c"])
    if kind == "composite":
        return Composite(map_from_descriptor(p["outer"]), map_from_descriptor(p["inner"]))
    if kind == "theodorsen":
        curve = JordanCurve.from_dict(p["curve"])
        exterior = p.get("direction", "disk") == "exterior"
        if "table" in p:
            tab = np.asarray(p["table"], float)
            rho, drho = polar_radius(curve)
            if exterior:
                rho_used = lambda psi: 1 / rho(psi)  # noqa: E731
            else:
                rho_used = rho
            res = TheodorsenResult(tab[:, 0], tab[:, 1], [], 0.0)
            return TheodorsenMap(curve, res, rho_used, "exterior" if exterior else "disk")
        return theodorsen_map(curve, exterior=exterior)
    raise ParameterError(f"unknown map kind {kind!r}")
