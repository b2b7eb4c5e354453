"""Diagnostics on the circle and on holomorphic fields.

Circle functions are samples on the uniform grid ``2 pi k / N``.  Arcs are
index windows ``[start, start + m)`` taken cyclically; at each scale
``m = N / 2**level`` either every translate (quasi-dyadic) or the dyadic
partition is scanned.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .confmap import ConformalMap
from .errors import DomainMismatchError, OutsideDomainError, ParameterError
from .geometry import unit_circle
from .measure import CarlesonReport, Cells, Measure, carleson_norm, exterior_cells
from .qcmap import CircleHomeomorphism

TWO_PI = 2 * np.pi


@dataclass(frozen=True, eq=False)
class CircleFunction:
    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.dtype.kind not in "fc":
            s = s.astype(float)
        n = len(s)
        if n < 16 or n & (n - 1):
            raise ParameterError("circle functions need a power-of-two grid of at least 16 samples")
        if not np.all(np.isfinite(s)):
            raise ParameterError("non-finite sample")
        object.__setattr__(self, "samples", s)

    @property
    def n(self) -> int:
        return len(self.samples)

    @property
    def theta(self) -> np.ndarray:
        return TWO_PI * np.arange(self.n) / self.n

    @classmethod
    def from_callable(cls, f, n: int = 1024) -> "CircleFunction":
        return cls(np.asarray(f(TWO_PI * np.arange(n) / n)))

    def __mul__(self, a):
        return CircleFunction(self.samples * a)

    __rmul__ = __mul__


@dataclass(frozen=True)
class ArcFamily:
    """Arcs of ``N / 2**level`` samples for ``level = 0..max_level``.

    ``stride`` is the translate step as a fraction of the arc length
    (1.0 gives the dyadic partition, ``None`` every translate).
    """

    n: int
    max_level: int | None = None
    stride: float | None = None

    @property
    def levels(self) -> range:
        top = int(np.log2(self.n)) - 4 if self.max_level is None else self.max_level
        return range(0, max(top, 0) + 1)

    def arcs(self, level: int):
        m = self.n >> level
        if level == 0:
            return np.array([0]), m
        step = 1 if self.stride is None else max(1, int(m * self.stride))
        return np.arange(0, self.n, step), m

    @classmethod
    def dyadic(cls, n: int, max_level: int | None = None) -> "ArcFamily":
        return cls(n, max_level, 1.0)


def _arc_label(n, start, m):
    return (TWO_PI * start / n, TWO_PI * m / n)


def _windows(x: np.ndarray, starts: np.ndarray, m: int) -> np.ndarray:
    ext = np.concatenate([x, x[: m - 1]]) if m > 1 else x
    return sliding_window_view(ext, m)[starts]


def _oscillation(x: np.ndarray, starts: np.ndarray, m: int, block: int = 1 << 22) -> np.ndarray:
    out = np.empty(len(starts))
    rows = max(1, block // m)
    for lo in range(0, len(starts), rows):
        w = _windows(x, starts[lo:lo + rows], m)
        out[lo:lo + rows] = np.abs(w - w.mean(axis=1, keepdims=True)).mean(axis=1)
    return out


@dataclass(frozen=True)
class BMOResult:
    norm: float
    worst_arc: tuple[float, float]  # (start angle, arc length)


def bmo_norm(f: CircleFunction, arcs: ArcFamily | None = None) -> BMOResult:
    """Sup over arcs of the mean oscillation ``mean_I |f - f_I|``."""
    arcs = ArcFamily(f.n) if arcs is None else arcs
    best, label = 0.0, (0.0, TWO_PI)
    for level in arcs.levels:
        starts, m = arcs.arcs(level)
        osc = _oscillation(f.samples, starts, m)
        k = int(np.argmax(osc))
        if osc[k] > best:
            best, label = float(osc[k]), _arc_label(f.n, starts[k], m)
    return BMOResult(best, label)


def vmo_profile(f: CircleFunction, arcs: ArcFamily | None = None) -> list[tuple[float, float]]:
    """``[(arc length, sup mean oscillation)]`` per level, largest arcs first."""
    arcs = ArcFamily(f.n) if arcs is None else arcs
    out = []
    for level in arcs.levels:
        starts, m = arcs.arcs(level)
        out.append((TWO_PI * m / f.n, float(_oscillation(f.samples, starts, m).max())))
    return out


# ---------------------------------------------------------------------------
# A-infinity


@dataclass(frozen=True)
class AInftyReport:
    passed: bool
    beta_used: float
    beta_min: float
    C1: float
    C2: float
    worst: tuple = None  # (arc (start, length), subset description, |E|/|I|, w(E)/w(I))
    pairs: np.ndarray = field(default=None, repr=False)


_UNIONS = np.array(list(itertools.product([0, 1], repeat=8)), float)


def a_infty_check(omega: CircleFunction, arcs: ArcFamily | None = None, beta: float = 0.1,
                  pieces: int = 8) -> AInftyReport:
    """Test the A-infinity condition on arcs and fit its power-law exponents.

    For every arc ``I`` the candidate subsets ``E`` are all unions of the
    ``pieces`` equal sub-arcs and the sub- and super-level sets of ``omega``
    inside ``I`` (the lowest / highest ``k`` samples).  The verdict is
    ``beta_min >= beta`` with ``beta_min`` the least ``omega(E)/omega(I)``
    over subsets with ``|E|/|I| >= 1/2``.  ``C1, C2`` come from a log-log
    least-squares slope with ``C2`` raised until ``omega(E)/omega(I) <=
    C2 (|E|/|I|)^C1`` holds on every collected pair.
    """
    w = np.asarray(omega.samples, float)
    if np.any(w < 0):
        raise ParameterError("weight must be nonnegative")
    if not w.sum() > 0:
        raise ParameterError("weight is identically zero")
    if pieces > 8:
        raise ParameterError("at most 8 sub-arcs")
    arcs = ArcFamily(omega.n, stride=0.25) if arcs is None else arcs
    unions = _UNIONS[:, 8 - pieces:][: 2**pieces]
    unions = np.unique(unions, axis=0)
    beta_min, worst = np.inf, None
    xs, ys = [], []
    for level in arcs.levels:
        starts, m = arcs.arcs(level)
        if m < pieces:
            continue
        win = _windows(w, starts, m)
        total = win.sum(axis=1)
        keep = total > 0
        win, total, st = win[keep], total[keep], starts[keep]
        if not len(st):
            continue
        # sub-arc unions
        edges = np.linspace(0, m, pieces + 1).astype(int)
        sub = np.add.reduceat(win, edges[:-1], axis=1)
        frac_len = unions @ np.diff(edges) / m
        frac_w = (sub @ unions.T) / total[:, None]
        # level sets: lowest / highest k samples
        srt = np.sort(win, axis=1)
        ks = np.arange(1, m + 1)
        low = np.cumsum(srt, axis=1) / total[:, None]
        high = np.cumsum(srt[:, ::-1], axis=1) / total[:, None]
        lvl_len = ks / m

        half_u = frac_len >= 0.5
        cand_u = np.where(half_u[None, :], frac_w, np.inf)
        half_l = lvl_len >= 0.5
        cand_l = np.where(half_l[None, :], low, np.inf)
        iu = np.unravel_index(int(np.argmin(cand_u)), cand_u.shape)
        il = np.unravel_index(int(np.argmin(cand_l)), cand_l.shape)
        if cand_u[iu] < beta_min:
            beta_min = float(cand_u[iu])
            mask = unions[iu[1]].astype(int).tolist()
            worst = (_arc_label(omega.n, st[iu[0]], m), {"sub_arcs": mask},
                     float(frac_len[iu[1]]), beta_min)
        if cand_l[il] < beta_min:
            beta_min = float(cand_l[il])
            worst = (_arc_label(omega.n, st[il[0]], m), {"lowest_samples": int(ks[il[1]])},
                     float(lvl_len[il[1]]), beta_min)
        # pairs for the power-law fit: the heaviest subsets of each size
        xs.append(np.broadcast_to(lvl_len, high.shape).ravel())
        ys.append(high.ravel())
        xs.append(np.broadcast_to(frac_len, frac_w.shape).ravel())
        ys.append(frac_w.ravel())
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    ok = (x > 0) & (x < 1) & (y > 0)
    lx, ly = np.log(x[ok]), np.log(y[ok])
    if len(lx) > 1 and np.ptp(lx) > 0:
        C1 = float(np.polyfit(lx, ly, 1)[0])
        C1 = max(C1, 1e-12)
        C2 = float(np.exp((ly - C1 * lx).max()))
    else:
        C1, C2 = 1.0, 1.0
    pairs = np.column_stack([x, y])
    return AInftyReport(bool(beta_min >= beta), beta, float(beta_min), C1, C2, worst, pairs)


# ---------------------------------------------------------------------------
# quasisymmetry


def default_t_grid(count: int = 256) -> np.ndarray:
    return np.geomspace(1e-3, np.pi / 2, count)


def _qs_ratios(h: CircleHomeomorphism, thetas, ts):
    th = np.asarray(thetas, float)[:, None]
    t = np.asarray(ts, float)[None, :]
    a = h.evaluate(th + t)
    b = h.evaluate(th)
    c = h.evaluate(th - t)
    # chord lengths on the circle: |e^{ix} - e^{iy}| = 2 |sin((x - y)/2)|
    return np.abs(np.sin((a - b) / 2)) / np.abs(np.sin((b - c) / 2))


@dataclass(frozen=True)
class QSReport:
    modulus: float
    witness: tuple[float, float]  # (theta, t)


def quasisymmetry_modulus(h: CircleHomeomorphism, ts=None, n_theta: int = 512) -> QSReport:
    """Grid sup of ``max(ratio, 1/ratio)`` for adjacent image chords of equal preimage arcs."""
    ts = default_t_grid() if ts is None else np.asarray(ts, float)
    thetas = TWO_PI * np.arange(n_theta) / n_theta
    r = _qs_ratios(h, thetas, ts)
    r = np.maximum(r, 1 / r)
    i, j = np.unravel_index(int(np.argmax(r)), r.shape)
    return QSReport(float(r[i, j]), (float(thetas[i]), float(ts[j])))


def symmetric_profile(h: CircleHomeomorphism, ts=None, n_theta: int = 512) -> list[tuple[float, float]]:
    """``[(t, sup_theta |ratio - 1|)]`` with ``t`` decreasing."""
    ts = default_t_grid() if ts is None else np.asarray(ts, float)
    ts = np.sort(ts)[::-1]
    thetas = TWO_PI * np.arange(n_theta) / n_theta
    r = _qs_ratios(h, thetas, ts)
    return [(float(t), float(v)) for t, v in zip(ts, np.abs(r - 1).max(axis=0))]


# ---------------------------------------------------------------------------
# Schwarzian


FD_STEP = 1e-2  # stencil radius as a fraction of the boundary distance

_ROOTS = np.array([1, 1j, -1, -1j])


def _boundary_gap(fmap: ConformalMap, z) -> np.ndarray:
    r = np.abs(z)
    return 1 - r if fmap.direction == "disk" else r - 1


def _fd_derivatives(fmap: ConformalMap, z: np.ndarray, h: np.ndarray):
    """Cross stencil ``z +- h, z +- ih`` (the centre weight is zero for j = 1..3).

    For holomorphic ``f`` the sums ``sum_w w^-j f(z + w h)`` over the fourth
    roots of unity isolate ``f^(j)`` up to ``O(h^4)`` for ``j = 1, 2, 3``.
    """
    vals = [fmap.evaluate(z + w * h) for w in _ROOTS]
    d = []
    for j, fact in ((1, 1.0), (2, 2.0), (3, 6.0)):
        acc = sum(w ** (-j) * v for w, v in zip(_ROOTS, vals))
        d.append(fact * acc / (4 * h**j))
    return tuple(d)


def schwarzian(fmap: ConformalMap, z, scheme: str = "analytic", step: float = FD_STEP):
    """``S(f) = f'''/f' - (3/2) (f''/f')^2``.

    ``scheme="analytic"`` uses the map's closed-form derivatives;
    ``"finite-difference"`` uses the five-point cross stencil with radius
    ``step`` times the distance to the unit circle.
    """
    z = np.asarray(z, complex)
    if scheme == "analytic":
        _, f1, f2, f3 = fmap.derivatives(z)
    elif scheme in ("finite-difference", "fd"):
        gap = _boundary_gap(fmap, z)
        if np.any(gap <= 0):
            raise OutsideDomainError("finite-difference stencil would cross the unit circle")
        h = step * gap
        if np.any(h >= gap):
            raise OutsideDomainError("finite-difference stencil would cross the unit circle")
        f1, f2, f3 = _fd_derivatives(fmap, z, h)
    else:
        raise ParameterError(f"unknown scheme {scheme!r}")
    return f3 / f1 - 1.5 * (f2 / f1) ** 2


def cocycle_residual(f: ConformalMap, g: ConformalMap, z, scheme: str = "analytic"):
    """``|S(f o g) - S(f)(g) g'^2 - S(g)|`` at ``z``."""
    from .confmap import Composite

    z = np.asarray(z, complex)
    gz = g.evaluate(z)
    if not np.all(f.in_domain(gz)):
        raise DomainMismatchError("g maps z outside the domain of f")
    fg = Composite(f, g)
    lhs = schwarzian(fg, z, scheme)
    rhs = schwarzian(f, gz, scheme) * g.deriv(z) ** 2 + schwarzian(g, z, scheme)
    return np.abs(lhs - rhs)


# ---------------------------------------------------------------------------
# B and curly-B norms on the exterior disk


@dataclass
class HolomorphicSample:
    """Holomorphic function on ``|z| > 1`` with its decay order at infinity."""

    func: object
    decay_order: int = 4
    name: str = ""

    def __call__(self, z):
        return np.asarray(self.func(np.asarray(z, complex)), complex)

    @classmethod
    def schwarzian_of(cls, fmap: ConformalMap, name: str = "") -> "HolomorphicSample":
        """Schwarzian of an exterior map fixing infinity (decays like ``z^-4``)."""
        if fmap.direction != "exterior":
            raise ParameterError("expected a map of the exterior disk")
        return cls(lambda z: schwarzian(fmap, z), 4, name or f"S({fmap.kind})")


@dataclass(frozen=True)
class BNormReport:
    norm: float
    witness: complex
    flagged: bool = False


def _exterior_grid(n_radii: int, n_angles: int, t_min: float, t_max: float):
    t = np.geomspace(t_min, t_max, n_radii)
    th = TWO_PI * np.arange(n_angles) / n_angles
    return (1 + t)[:, None] * np.exp(1j * th)[None, :]


def b_norm(phi: HolomorphicSample, n_radii: int = 256, n_angles: int = 256,
           t_min: float = 1e-4, t_max: float = 1e6) -> BNormReport:
    """Grid sup of ``(|z|^2 - 1)^2 |phi(z)|`` over ``1 + t_min <= |z| <= 1 + t_max``.

    The far shells stand in for the ``|z| -> infinity`` limit.  A decay
    order below 4 makes the norm infinite; that case is returned flagged.
    """
    if phi.decay_order < 4:
        return BNormReport(float("inf"), complex("inf"), True)
    z = _exterior_grid(n_radii, n_angles, t_min, t_max)
    v = (np.abs(z) ** 2 - 1) ** 2 * np.abs(phi(z))
    i, j = np.unravel_index(int(np.argmax(v)), v.shape)
    return BNormReport(float(v[i, j]), complex(z[i, j]))


def b0_profile(phi: HolomorphicSample, shells=None, n_angles: int = 512) -> list[tuple[float, float]]:
    """``[(t, sup_{|z| = 1 + t} (|z|^2 - 1)^2 |phi|)]`` for shells approaching the circle."""
    ts = np.geomspace(1.0, 1e-4, 32) if shells is None else np.asarray(shells, float)
    th = TWO_PI * np.arange(n_angles) / n_angles
    out = []
    for t in ts:
        z = (1 + t) * np.exp(1j * th)
        out.append((float(t), float(((np.abs(z) ** 2 - 1) ** 2 * np.abs(phi(z))).max())))
    return out


def curly_b_measure(phi: HolomorphicSample, cells: Cells | None = None) -> Measure:
    cells = exterior_cells() if cells is None else cells
    z = cells.centers
    w = np.abs(phi(z)) ** 2 * (np.abs(z) ** 2 - 1) ** 3 * cells.areas
    return Measure(z, w, unit_circle(512), exterior=True, validate=False)


def curly_b_norm(phi: HolomorphicSample, cells: Cells | None = None, radii=None) -> CarlesonReport:
    """Carleson norm of ``|phi|^2 (|z|^2 - 1)^3 dx dy`` on the exterior, against the unit circle."""
    if phi.decay_order < 4:
        return CarlesonReport(float("inf"), (0j, 0.0), (0, 0))
    return carleson_norm(curly_b_measure(phi, cells), radii=radii)
