import json

import numpy as np
import pytest

from carleson.confmap import (
    Composite, EllipseExterior, Koebe, Lens, Mobius, PolyMap, koebe_bounds_check, map_from_descriptor,
    pull_back, push_forward, theodorsen_correspondence, theodorsen_map, welding,
)
from carleson.errors import ConvergenceError, DomainMismatchError, OutsideDomainError, ParameterError
from carleson.geometry import generate_curve, polar_radius, unit_circle
from carleson.measure import Measure, carleson_norm, default_radii

CIRC = unit_circle(512)


def disk_points(rng, n, r_max=0.95):
    return r_max * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))


ANALYTIC = [Mobius(0.3 - 0.2j, 0.7), PolyMap(0.3), PolyMap(0.2 + 0.1j), Lens(0.8), Lens(1.3), Koebe(),
            Composite(PolyMap(0.2), Mobius(0.4))]


def test_simple_values():
    z = np.array([0.1 + 0.2j, -0.5])
    np.testing.assert_allclose(Mobius(0, 0).evaluate(z), z)
    f = PolyMap(0.3)
    assert f.evaluate(np.array([0j]))[0] == 0 and f.deriv(np.array([0j]))[0] == 1
    assert Mobius(0.5).deriv(np.array([-0.5]))[0] == pytest.approx(4 / 3)


@pytest.mark.parametrize("fmap", ANALYTIC, ids=lambda f: f.kind)
def test_derivatives_match_differences(fmap):
    z = disk_points(np.random.default_rng(0), 40, 0.8)
    h = 1e-5
    f, f1, f2, f3 = fmap.derivatives(z)
    d1 = (fmap.evaluate(z + h) - fmap.evaluate(z - h)) / (2 * h)
    d2 = (fmap.deriv(z + h) - fmap.deriv(z - h)) / (2 * h)
    np.testing.assert_allclose(d1, f1, rtol=1e-6)
    np.testing.assert_allclose(d2, f2, rtol=1e-6, atol=1e-9)
    f2p = fmap.derivatives(z + h)[2]
    f2m = fmap.derivatives(z - h)[2]
    np.testing.assert_allclose((f2p - f2m) / (2 * h), f3, rtol=1e-5, atol=1e-6)


@pytest.mark.parametrize("fmap", ANALYTIC, ids=lambda f: f.kind)
def test_inverse_roundtrip(fmap):
    z = disk_points(np.random.default_rng(1), 200, 0.9)
    np.testing.assert_allclose(fmap.invert(fmap.evaluate(z)), z, atol=1e-10)


def test_outside_domain():
    with pytest.raises(OutsideDomainError):
        PolyMap(0.3).evaluate(np.array([1.5]))
    with pytest.raises(OutsideDomainError):
        EllipseExterior(0.2).evaluate(np.array([0.5]))
    with pytest.raises(ParameterError):
        PolyMap(0.5)


def test_exterior_ellipse():
    f = EllipseExterior(0.2)
    z = 1.5 * np.exp(1j * np.linspace(0, 6, 7))
    np.testing.assert_allclose(f.invert(f.evaluate(z)), z, atol=1e-12)


def test_theodorsen_circle_one_iteration():
    rho, drho = polar_radius(unit_circle(256))
    res = theodorsen_correspondence(rho, drho, 256)
    assert res.iterations == 1
    np.testing.assert_allclose(res.theta, res.phi, atol=1e-14)


def test_theodorsen_star():
    curve = generate_curve("star", 1024, a=0.1, k=3)
    rho, drho = polar_radius(curve)
    res = theodorsen_correspondence(rho, drho, 1024, tol=1e-8, max_iter=200)
    assert res.residual < 1e-8 and res.iterations <= 200
    # contraction: monotone after the first few steps (epsilon ~ 0.3)
    hist = res.history[5:]
    assert all(b <= a for a, b in zip(hist, hist[1:]))


def test_theodorsen_rejects_large_epsilon():
    rho = lambda q: 1 + 0.5 * np.cos(3 * q)  # noqa: E731
    drho = lambda q: -1.5 * np.sin(3 * q)  # noqa: E731
    with pytest.raises(ParameterError):
        theodorsen_correspondence(rho, drho, 256)


def test_theodorsen_nonconvergence_reports_history():
    curve = generate_curve("star", 512, a=0.2, k=3)
    rho, drho = polar_radius(curve)
    with pytest.raises(ConvergenceError) as info:
        theodorsen_correspondence(rho, drho, 512, tol=1e-14, max_iter=3)
    assert len(info.value.history) == 3


def test_theodorsen_map_boundary_and_inverse():
    curve = generate_curve("star", 512, a=0.1, k=3)
    f = theodorsen_map(curve)
    w = f.evaluate(np.exp(1j * np.linspace(0, 2 * np.pi, 64)))
    rho, _ = polar_radius(curve)
    np.testing.assert_allclose(np.abs(w), rho(np.angle(w)), atol=1e-10)
    z = disk_points(np.random.default_rng(2), 100, 0.95)
    np.testing.assert_allclose(f.invert(f.evaluate(z)), z, atol=1e-10)
    assert f.evaluate(np.array([0j]))[0] == pytest.approx(0, abs=1e-12)
    g = theodorsen_map(curve, exterior=True)
    zz = 1.2 * np.exp(1j * np.linspace(0, 6, 9))
    np.testing.assert_allclose(g.invert(g.evaluate(zz)), zz, atol=1e-10)


def test_theodorsen_descriptor_roundtrip():
    f = theodorsen_map(generate_curve("star", 256, a=0.1, k=3))
    g = map_from_descriptor(json.loads(f.to_json()))
    z = disk_points(np.random.default_rng(3), 20)
    np.testing.assert_allclose(g.evaluate(z), f.evaluate(z), atol=1e-12)


@pytest.mark.parametrize("fmap", [Mobius(0.3, 1.0), PolyMap(0.3), Lens(0.8), Koebe()], ids=lambda f: f.kind)
def test_descriptor_roundtrip(fmap):
    g = map_from_descriptor(json.loads(fmap.to_json()))
    z = disk_points(np.random.default_rng(4), 20)
    np.testing.assert_allclose(g.evaluate(z), fmap.evaluate(z))


def test_koebe_bounds():
    rep = koebe_bounds_check(Mobius(0, 0), [0j])
    assert rep.passed and rep.lower[0] == 0.25 and rep.upper[0] == 1
    rep = koebe_bounds_check(Koebe(), [0j])
    assert rep.passed and rep.distance[0] == pytest.approx(0.25) and rep.worst_lower_ratio == pytest.approx(1)
    pts = disk_points(np.random.default_rng(5), 100, 0.95)
    assert koebe_bounds_check(PolyMap(0.3), pts).passed


def test_pull_back_mobius_atom():
    m = Measure([0j], [1.0], CIRC)
    nu = pull_back(m, Mobius(0.5), CIRC)
    assert abs(nu.points[0] + 0.5) < 1e-12
    assert abs(nu.weights[0] - 0.75) < 1e-12
    assert carleson_norm(nu).norm == pytest.approx(1.5, rel=0.02)
    back = push_forward(Measure([-0.5], [1.0], CIRC), Mobius(0.5), CIRC)
    assert back.points[0] == pytest.approx(0, abs=1e-15)
    assert back.weights[0] == pytest.approx(4 / 3)


def test_transport_identity_and_roundtrip():
    rng = np.random.default_rng(6)
    m = Measure(disk_points(rng, 300), rng.random(300), CIRC)
    ident = Mobius(0, 0)
    np.testing.assert_allclose(pull_back(m, ident, CIRC).weights, m.weights)
    f = PolyMap(0.3)
    img = push_forward(m, f)
    back = push_forward(pull_back(img, f, CIRC), f, img.domain)
    np.testing.assert_allclose(back.points, img.points, atol=1e-10)
    np.testing.assert_allclose(back.weights, img.weights, rtol=1e-10)
    atom = pull_back(Measure([0j], [1.0], img.domain), f)
    assert atom.points[0] == 0 and atom.weights[0] == 1


def test_push_forward_needs_disk_measure():
    lens_curve = generate_curve("lens", 256, alpha=0.8)
    with pytest.raises(DomainMismatchError):
        push_forward(Measure([0j], [1.0], lens_curve), PolyMap(0.3))


def test_mobius_quasi_invariance_stable():
    rng = np.random.default_rng(7)
    m = Measure(disk_points(rng, 2000, 0.99), rng.random(2000) / 2000, CIRC)
    f = Mobius(0.3 + 0.1j)
    consts = []
    for n_c, n_r in [(256, 32), (512, 64)]:
        c, r = unit_circle(n_c).samples, default_radii(CIRC, n_r)
        ratio = carleson_norm(pull_back(m, f, CIRC), c, r).norm / carleson_norm(m, c, r).norm
        consts.append(max(ratio, 1 / ratio))
    assert abs(consts[1] - consts[0]) <= 0.1 * consts[0]


def test_welding_circle_identity():
    w = welding(unit_circle(512))
    dev = w.h.H - w.h.theta
    assert np.abs(dev - dev.mean()).max() < 1e-6
    assert w.normalization == "H(0) = 0"


def test_welding_ellipse_residual_and_monotone():
    w = welding(generate_curve("ellipse", 1024, c=0.2))
    assert w.residual < 1e-10
    assert np.all(np.diff(w.h.H) > 0)
    assert w.h.H[0] == 0


def test_welding_star_uses_inversion():
    w = welding(generate_curve("star", 512, a=0.1, k=3))
    assert w.residual < 1e-10
    assert np.all(w.h.dH > 0)
