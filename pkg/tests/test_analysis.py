import numpy as np
import pytest

from carleson.analysis import (
    ArcFamily, CircleFunction, HolomorphicSample, a_infty_check, b0_profile, b_norm, bmo_norm, cocycle_residual,
    curly_b_norm, quasisymmetry_modulus, schwarzian, symmetric_profile, vmo_profile,
)
from carleson.confmap import EllipseExterior, Koebe, Mobius, PolyMap
from carleson.errors import DomainMismatchError, ParameterError
from carleson.measure import exterior_cells
from carleson.qcmap import CircleHomeomorphism

N = 1024
SEMI = CircleFunction.from_callable(lambda t: (t < np.pi).astype(float), N)


def test_circle_function_grid():
    with pytest.raises(ParameterError):
        CircleFunction(np.ones(100))


def test_arc_family_partitions():
    fam = ArcFamily.dyadic(256)
    for level in fam.levels:
        starts, m = fam.arcs(level)
        assert len(starts) * m == 256
    assert max(fam.levels) == int(np.log2(256)) - 4


def test_bmo_examples():
    assert bmo_norm(CircleFunction(np.full(N, 3.0))).norm == 0
    assert bmo_norm(SEMI).norm == pytest.approx(0.5)
    f = CircleFunction.from_callable(np.cos, N)
    assert bmo_norm(2.5 * f).norm == pytest.approx(2.5 * bmo_norm(f).norm)
    assert bmo_norm(CircleFunction(f.samples + 7)).norm == pytest.approx(bmo_norm(f).norm)


def test_vmo_profiles():
    assert all(v == 0 for _, v in vmo_profile(CircleFunction(np.ones(N))))
    prof = vmo_profile(CircleFunction.from_callable(np.cos, N))
    vals = [v for _, v in prof]
    # arcs of length >= pi already see the full range of cos
    assert vals[0] == pytest.approx(vals[1])
    assert all(b < a for a, b in zip(vals[1:], vals[2:]))
    scale, val = prof[-1]
    assert val <= scale  # oscillation <= arc length * sup|f'|
    assert min(v for _, v in vmo_profile(SEMI)) >= 0.4


def test_a_infty_examples():
    one = a_infty_check(CircleFunction(np.ones(N)))
    assert one.passed and one.C1 == pytest.approx(1) and one.C2 == pytest.approx(1)
    bad = a_infty_check(SEMI)
    assert not bad.passed and bad.beta_min == 0 and bad.worst is not None
    arc, subset, frac, ratio = bad.worst
    assert frac >= 0.5 and ratio == 0
    assert a_infty_check(CircleFunction.from_callable(lambda t: 2 + np.cos(t), N)).passed
    with pytest.raises(ParameterError):
        a_infty_check(CircleFunction(np.zeros(N)))


def test_a_infty_scale_invariant():
    w = CircleFunction.from_callable(lambda t: 1 + 0.9 * np.sin(3 * t), 512)
    a, b = a_infty_check(w), a_infty_check(17.0 * w)
    assert a.passed == b.passed
    assert a.beta_min == pytest.approx(b.beta_min)


def test_quasisymmetry():
    ident = CircleHomeomorphism.identity(512)
    assert quasisymmetry_modulus(ident).modulus == pytest.approx(1, abs=1e-10)
    assert quasisymmetry_modulus(CircleHomeomorphism.rotation(0.7, 512)).modulus == pytest.approx(1, abs=1e-10)
    sine = CircleHomeomorphism.from_lift(lambda x: x + 0.3 * np.sin(x), lambda x: 1 + 0.3 * np.cos(x), 512)
    m = quasisymmetry_modulus(sine).modulus
    assert 1 < m < 3
    rotated = CircleHomeomorphism.rotation(1.1, 512).compose(sine.compose(CircleHomeomorphism.rotation(0.4, 512)))
    assert quasisymmetry_modulus(rotated).modulus == pytest.approx(m, rel=0.02)


def test_symmetric_profiles():
    assert max(v for _, v in symmetric_profile(CircleHomeomorphism.identity(512))) < 1e-10
    sine = CircleHomeomorphism.from_lift(lambda x: x + 0.3 * np.sin(x), lambda x: 1 + 0.3 * np.cos(x), 512)
    prof = symmetric_profile(sine, ts=[1e-1, 1e-2, 1e-3])
    assert prof[1][1] / prof[0][1] == pytest.approx(0.1, rel=0.1)  # O(t)
    # slope 2 to the right of 0, slope 1 to the left (rescaled to a lift)
    a = 2 * np.pi / (np.pi + 2 * np.pi)

    def lift(x):
        x = np.mod(np.asarray(x, float), 2 * np.pi)
        k = np.floor_divide(np.asarray(x), 2 * np.pi)
        return np.where(x < np.pi, 2 * a * x, 2 * a * np.pi + a * (x - np.pi)) + 2 * np.pi * k

    jump = CircleHomeomorphism.from_lift(lift, n=512)
    assert symmetric_profile(jump, ts=[1e-3])[0][1] >= 0.3


def test_schwarzian_examples():
    rng = np.random.default_rng(0)
    z = 0.9 * np.sqrt(rng.random(50)) * np.exp(2j * np.pi * rng.random(50))
    assert np.abs(schwarzian(Mobius(0.3 + 0.2j, 1.0), z)).max() < 1e-10
    zk = 0.5 * z
    np.testing.assert_allclose(schwarzian(Koebe(), zk), -6 / (1 - zk**2) ** 2, rtol=1e-6)
    np.testing.assert_allclose(schwarzian(Koebe(), zk, "finite-difference"), -6 / (1 - zk**2) ** 2, rtol=1e-4)
    assert schwarzian(PolyMap(0.25), 0j) == pytest.approx(-0.375, abs=1e-10)


def test_schwarzian_schemes_agree():
    rng = np.random.default_rng(1)
    z = 0.85 * np.sqrt(rng.random(40)) * np.exp(2j * np.pi * rng.random(40))
    for f in [PolyMap(0.3), Mobius(0.4), Koebe()]:
        a = schwarzian(f, z)
        b = schwarzian(f, z, "fd")
        assert np.all(np.abs(a - b) <= 1e-4 * np.maximum(np.abs(a), 1.0))


def test_schwarzian_exterior_ellipse():
    f = EllipseExterior(0.2)
    z = 1.5 * np.exp(1j * np.linspace(0, 6, 7))
    np.testing.assert_allclose(schwarzian(f, z), -6 * 0.2 / (z**2 - 0.2) ** 2, rtol=1e-10)


def test_cocycle():
    assert cocycle_residual(Mobius(0.2), Mobius(-0.5j, 1), 0.3j) < 1e-12
    assert cocycle_residual(Koebe(), Mobius(0.3), 0.1) < 1e-8
    rng = np.random.default_rng(2)
    z = 0.9 * np.sqrt(rng.random(50)) * np.exp(2j * np.pi * rng.random(50))
    assert np.max(cocycle_residual(PolyMap(0.2), Mobius(0.4), z)) < 1e-8
    with pytest.raises(DomainMismatchError):
        cocycle_residual(PolyMap(0.2), EllipseExterior(0.2), 2.0)


def test_b_norms():
    zero = HolomorphicSample(lambda z: 0 * z)
    assert b_norm(zero).norm == 0
    assert b_norm(HolomorphicSample(lambda z: z**-4)).norm == pytest.approx(1, rel=1e-5)
    assert b_norm(HolomorphicSample(lambda z: z**-2, decay_order=2)).flagged
    vals = [b_norm(HolomorphicSample.schwarzian_of(EllipseExterior(c))).norm for c in [0.2, 0.1, 0.05]]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    shells = b0_profile(HolomorphicSample.schwarzian_of(EllipseExterior(0.2)))
    assert shells[-1][1] < shells[0][1]


def test_curly_b():
    cells = exterior_cells(t_min=1e-4, max_angles=1024)
    assert curly_b_norm(HolomorphicSample(lambda z: 0 * z), cells).norm == 0
    n1 = curly_b_norm(HolomorphicSample(lambda z: z**-4), cells).norm
    n2 = curly_b_norm(HolomorphicSample(lambda z: 2 * z**-4), cells).norm
    assert n2 == pytest.approx(4 * n1, rel=1e-12)
    phi = HolomorphicSample.schwarzian_of(EllipseExterior(0.2))
    cb = curly_b_norm(phi, cells).norm
    assert np.isfinite(cb) and cb > 0


def test_b_controlled_by_curly_b():
    # grid b_norm <= K sqrt(curly_b_norm) with K stable under refinement
    ks = []
    for t_min, ang in [(1e-3, 512), (1e-4, 1024)]:
        cells = exterior_cells(t_min=t_min, max_angles=ang)
        k = []
        for c in [0.05, 0.1, 0.2]:
            phi = HolomorphicSample.schwarzian_of(EllipseExterior(c))
            k.append(b_norm(phi).norm / np.sqrt(curly_b_norm(phi, cells).norm))
        ks.append(max(k))
    assert abs(ks[1] - ks[0]) <= 0.1 * ks[0]
