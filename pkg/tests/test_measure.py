import json

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from carleson.errors import DomainMismatchError, OutsideDomainError, ParameterError
from carleson.geometry import generate_curve, unit_circle
from carleson.measure import (
    Measure, add, cartesian_cells, carleson_norm, collar_deficit, default_radii, disk_masses,
    from_density, restrict_to_collar, scale, segment_measure, vanishing_profile, whitney_cells, zero_measure,
)

CIRC = unit_circle(256)


def lens_area(r):
    """Area of the unit disk inside a disk of radius r centred on the unit circle."""
    a = 2 * np.arccos(r / 2)  # angle at the boundary centre
    b = 2 * np.arccos(1 - r * r / 2)  # angle at the origin
    return 0.5 * r * r * (a - np.sin(a)) + 0.5 * (b - np.sin(b))


def test_lens_area_oracle():
    # sanity of the closed form and the maximiser of A(r)/r
    assert lens_area(2.0) == pytest.approx(np.pi)
    res = minimize_scalar(lambda r: -lens_area(r) / r, bounds=(0.1, 2.0), method="bounded")
    assert -res.fun == pytest.approx(1.620, abs=1e-3)
    assert res.x == pytest.approx(1.8, abs=0.05)


def test_zero_measure_norm():
    assert carleson_norm(zero_measure(CIRC)).norm == 0.0


def test_unit_atom_at_origin():
    rep = carleson_norm(Measure([0], [1.0], CIRC))
    assert rep.norm == pytest.approx(1.0, abs=1e-12)
    assert rep.witness[1] == pytest.approx(1.0)


def test_area_measure_norm():
    m = from_density(lambda z: np.ones(z.shape), cartesian_cells(256, CIRC), CIRC)
    rep = carleson_norm(m, radii=default_radii(CIRC, 64))
    assert 1.55 <= rep.norm <= 1.63
    assert rep.witness[1] == pytest.approx(1.8, abs=0.1)


def test_closed_disk_tie():
    # an atom exactly at distance r from a center counts
    m = Measure([0.5], [1.0], CIRC)
    assert disk_masses(m, [1.0], [0.5])[0, 0] == 1.0


def test_outside_atoms_rejected():
    with pytest.raises(OutsideDomainError):
        Measure([1.5], [1.0], CIRC)
    with pytest.raises(ParameterError):
        Measure([0.1], [-1.0], CIRC)


def test_workers_do_not_change_result():
    rng = np.random.default_rng(3)
    p = 0.95 * np.sqrt(rng.random(3000)) * np.exp(2j * np.pi * rng.random(3000))
    m = Measure(p, rng.random(3000), CIRC)
    a = disk_masses(m, CIRC.samples, default_radii(CIRC))
    b = disk_masses(m, CIRC.samples, default_radii(CIRC), workers=4)
    np.testing.assert_array_equal(a, b)


def test_boxed_masses_match_brute_force():
    from carleson.measure import _mass_block

    rng = np.random.default_rng(4)
    p = 0.99 * np.sqrt(rng.random(20000)) * np.exp(2j * np.pi * rng.random(20000))
    w = rng.random(20000)
    m = Measure(p, w, CIRC)
    c = CIRC.samples[::4]
    # include radii hitting atoms exactly (closed-disk ties)
    r = np.sort(np.concatenate([default_radii(CIRC, 32), np.abs(p[:32] - c[:32])]))
    np.testing.assert_allclose(disk_masses(m, c, r), _mass_block(p, w, c, r), rtol=1e-12, atol=1e-12)


def test_profile_compact_support_zero():
    rng = np.random.default_rng(0)
    p = 0.5 * np.sqrt(rng.random(100)) * np.exp(2j * np.pi * rng.random(100))
    prof = vanishing_profile(Measure(p, np.ones(100), CIRC))
    assert np.all(prof.values[prof.radii < 0.5 - 1e-9] == 0)
    assert np.all(np.diff(prof.radii) < 0)


def test_segment_profile_near_one():
    seg = segment_measure(unit_circle(1024), 4096)
    prof = vanishing_profile(seg, radii=np.geomspace(1e-2, 1, 20))
    np.testing.assert_allclose(prof.values, 1.0, atol=0.01)


def test_restrict_to_collar():
    seg = segment_measure(CIRC, 1000)
    assert len(restrict_to_collar(seg, 0)) == 1000
    assert len(restrict_to_collar(seg, 2.0)) == 0
    kept = restrict_to_collar(seg, 0.25)
    assert kept.points.real.max() < 0.75
    assert len(kept) == 750


def test_collar_deficit_examples():
    m = Measure([0.1, -0.2j], [1.0, 2.0], CIRC)
    assert all(d == 0 for _, d in collar_deficit(m, [0.5, 0.1, 0.01]))
    seg = segment_measure(unit_circle(512), 4096)
    for r, d in collar_deficit(seg, [0.1, 0.03, 0.01], radii=np.geomspace(2e-3, 2, 48)):
        assert d >= 0.9
    with pytest.raises(ParameterError):
        collar_deficit(seg, [0.01, 0.1])


def test_boundary_power_profile_bound():
    circ = unit_circle(512)
    cells = whitney_cells(t_min=1e-6, t_fine=1e-4)
    m = from_density(lambda z: (1 - np.abs(z) ** 2) ** -0.5, cells, circ)
    prof = vanishing_profile(m, radii=np.geomspace(1e-3, 0.1, 9))
    assert np.all(prof.values <= 3 * np.sqrt(prof.radii))


def test_scale_add():
    m = Measure([0.3, 0.1j], [1.0, 2.0], CIRC)
    assert carleson_norm(scale(m, 0)).norm == 0
    assert carleson_norm(scale(m, 2)).norm == pytest.approx(2 * carleson_norm(m).norm, rel=1e-15)
    s = add(m, zero_measure(CIRC))
    np.testing.assert_array_equal(s.weights, m.weights)
    with pytest.raises(DomainMismatchError):
        add(m, zero_measure(unit_circle(128)))


def test_refinement_never_decreases():
    # doubling centers and inserting midpoints between radii keeps the old grid
    rng = np.random.default_rng(5)
    p = 0.99 * np.sqrt(rng.random(500)) * np.exp(2j * np.pi * rng.random(500))
    m = Measure(p, rng.random(500), CIRC)
    r1 = np.geomspace(2e-3, 2, 33)
    r2 = np.geomspace(2e-3, 2, 65)
    n1 = carleson_norm(m, unit_circle(128).samples, r1).norm
    n2 = carleson_norm(m, unit_circle(256).samples, r2).norm
    assert n2 >= n1 - 1e-12


def test_measure_json_roundtrip():
    m = Measure([0.3, 0.1j], [1.0, 2.0], CIRC)
    back = Measure.from_dict(json.loads(json.dumps(m.to_dict())))
    np.testing.assert_array_equal(back.points, m.points)
    np.testing.assert_array_equal(back.weights, m.weights)


def test_measure_on_other_domain():
    lens = generate_curve("lens", 512, alpha=0.8)
    m = Measure([0.0], [1.0], lens)
    assert carleson_norm(m).norm > 0
