import json

import numpy as np
import pytest

from carleson.errors import InvalidCurveError, ParameterError
from carleson.geometry import (
    JordanCurve, ahlfors_constant, chord_arc_constant, chord_arc_ratio, contains, distance_to_curve,
    generate_curve, koch_vertices, locate, polar_radius, unit_circle, winding_numbers,
)

SQUARE = [[1, -1], [1, 1], [-1, 1], [-1, -1]]


def test_circle_samples():
    c = generate_curve("circle", 256)
    assert c.n == 256
    np.testing.assert_allclose(np.abs(c.samples), 1, atol=1e-15)


def test_polyimage_formula():
    c = generate_curve("polyimage", 256, c=0.3)
    t = 2 * np.pi * np.arange(256) / 256
    np.testing.assert_allclose(c.samples, np.exp(1j * t) + 0.3 * np.exp(2j * t), atol=1e-15)


def test_koch_segment_count():
    # 3 * 4**L edges on the closed snowflake
    for level in range(4):
        assert len(koch_vertices(level)) == 3 * 4**level
    curve = generate_curve("koch", 256, level=3)
    assert curve.n == 256 and curve.params == {"level": 3}


@pytest.mark.parametrize("family, n, params", [
    ("circle", 100, {}),
    ("circle", 32, {}),
    ("polyimage", 256, {"c": 0.5}),
    ("star", 256, {"a": 0.3, "k": 4}),
    ("lens", 256, {"alpha": 2.0}),
    ("ellipse", 256, {"c": 1.0}),
    ("nonsense", 256, {}),
])
def test_generate_rejects_bad_input(family, n, params):
    with pytest.raises(ParameterError):
        generate_curve(family, n, **params)


def test_self_intersection_rejected():
    bowtie = np.array([0, 1 + 1j, 1, 1j])
    t = np.linspace(0, 1, 16, endpoint=False)
    z = np.concatenate([a + t * (b - a) for a, b in zip(bowtie, np.roll(bowtie, -1))])
    with pytest.raises(InvalidCurveError):
        JordanCurve(z, "polygon", {})


def test_curve_json_roundtrip():
    c = generate_curve("star", 128, a=0.1, k=3)
    d = json.loads(c.to_json())
    assert set(d) >= {"family", "params", "n", "samples"}
    back = JordanCurve.from_dict(d)
    np.testing.assert_array_equal(back.samples, c.samples)
    assert back.family == "star" and back.params == {"a": 0.1, "k": 3}


def test_chord_arc_circle():
    rep = chord_arc_constant(unit_circle(256))
    assert rep.constant == pytest.approx(np.pi / 2, rel=1e-4)
    a, b = rep.witness_pair
    assert abs(a + b) < 1e-12  # antipodal


def test_chord_arc_square():
    sq = generate_curve("polygon", 256, vertices=SQUARE)
    assert chord_arc_constant(sq).constant == pytest.approx(2.0, abs=1e-12)


@pytest.mark.parametrize("level", [1, 2])
def test_koch_generator_edge(level):
    n = 1 << int(np.ceil(np.log2(64 * 3 * 4**level)))
    curve = generate_curve("koch", n, level=level)
    v = koch_vertices(level)
    i = int(np.argmin(np.abs(curve.samples - v[0])))
    j = int(np.argmin(np.abs(curve.samples - v[4**level])))
    assert chord_arc_ratio(curve, i, j) == pytest.approx((4 / 3) ** level, rel=1e-2)


def test_chord_arc_refinement_monotone():
    for fam, p in [("ellipse", {"c": 0.3}), ("star", {"a": 0.1, "k": 3}), ("polyimage", {"c": 0.3})]:
        a = chord_arc_constant(generate_curve(fam, 128, **p)).constant
        b = chord_arc_constant(generate_curve(fam, 256, **p)).constant
        assert b >= a - 1e-12


def test_degenerate_chord():
    with pytest.raises(InvalidCurveError):
        chord_arc_ratio(unit_circle(64), 3, 3)


def test_ahlfors_circle():
    circ = unit_circle(1024)
    rep = ahlfors_constant(circ, centers=[0], radii=[0.5, 1.0 + 1e-12])
    assert rep.constant == pytest.approx(2 * np.pi, rel=1e-4)


def test_ahlfors_lower_bound_any_curve():
    for curve in [unit_circle(256), generate_curve("koch", 256, level=2), generate_curve("lens", 256, alpha=0.8)]:
        assert ahlfors_constant(curve).constant >= 2 * (1 - 10 / curve.n)


def test_ahlfors_koch_increases():
    vals = [ahlfors_constant(generate_curve("koch", 1024, level=L)).constant for L in range(1, 5)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_ahlfors_empty_grid():
    with pytest.raises(ParameterError):
        ahlfors_constant(unit_circle(64), centers=[], radii=[1.0])


def test_distances():
    circ = unit_circle(4096)
    assert distance_to_curve(0, circ) == pytest.approx(1.0)
    assert distance_to_curve(0.5, circ) == pytest.approx(0.5)
    assert distance_to_curve(2.0, circ) == pytest.approx(1.0)
    sq = generate_curve("polygon", 64, vertices=SQUARE)
    assert distance_to_curve(0.25, sq) == pytest.approx(0.75)
    assert distance_to_curve(1 + 0.3j, sq) == 0.0


def test_contains():
    circ = unit_circle(256)
    assert contains(0, circ) is True
    assert contains(3, circ) is False
    assert contains(0.99, generate_curve("polyimage", 1024, c=0.3)) is True
    assert contains(circ.samples[5], circ) == "boundary"
    sq = generate_curve("polygon", 64, vertices=SQUARE)
    assert locate(1, sq) == "boundary"


def test_contains_shift_invariant():
    rng = np.random.default_rng(1)
    curve = generate_curve("star", 256, a=0.2, k=4)
    shifted = JordanCurve(np.roll(curve.samples, 37), curve.family, curve.params)
    pts = 1.5 * (rng.random(200) - 0.5) * 2 + 1.5j * (rng.random(200) - 0.5) * 2
    np.testing.assert_array_equal(winding_numbers(pts, curve), winding_numbers(pts, shifted))


def test_polar_radius_star():
    curve = generate_curve("star", 512, a=0.1, k=3)
    rho, drho = polar_radius(curve)
    q = np.linspace(0, 2 * np.pi, 50)
    np.testing.assert_allclose(rho(q), 1 + 0.1 * np.cos(3 * q), atol=1e-10)
    np.testing.assert_allclose(drho(q), -0.3 * np.sin(3 * q), atol=1e-8)
