import cmath
import math

import pytest
from hypothesis import given, settings, strategies as st

from cp1lab.moebius import (
    ComplexPoint,
    MobiusMap,
    MobiusClass,
    classify,
    elliptic_about_axis,
    fixed_points,
    geodesic_endpoints,
    loxodromic_along_axis,
    mobius_from_json,
    mobius_to_json,
    mobius_to_zero_inf_one,
    uhp_distance,
)

I2 = MobiusMap.identity()


def mob(a, b, c, d):
    return MobiusMap(a, b, c, d)


finite = st.complex_numbers(min_magnitude=0, max_magnitude=5, allow_nan=False,
                            allow_infinity=False)


def random_sl2(rng):
    while True:
        a, b, c = (complex(rng.uniform(-2, 2), rng.uniform(-2, 2)) for _ in range(3))
        if abs(a) > 0.1:
            d = (1 + b * c) / a
            return MobiusMap(a, b, c, d, _normalized=True)


def test_compose_identity_and_inverse():
    m = mob(2, 1, 1, 1)
    assert I2.compose(m).dist(m) < 1e-12
    assert m.compose(m.inverse()).dist(I2) < 1e-12


def test_compose_diagonals():
    m1 = mob(2, 0, 0, 0.5)
    m2 = mob(3, 0, 0, 1 / 3)
    m = m1 @ m2
    assert abs(m.a - 6) < 1e-12 and abs(m.d - 1 / 6) < 1e-12


def test_determinant_normalized_after_operations():
    import random
    rng = random.Random(7)
    for _ in range(50):
        m = random_sl2(rng) @ random_sl2(rng)
        assert abs(m.det() - 1) < 1e-12


def test_apply_identity_and_pole():
    p = ComplexPoint(1 + 1j)
    assert I2.apply(p).approx_eq(p)
    inv = mob(0, 1, -1, 0)  # z -> -1/z
    assert inv.apply(ComplexPoint(0)).is_infinity()
    assert inv.apply(ComplexPoint.infinity()).approx_eq(ComplexPoint(0))


def test_apply_scaling_map():
    ell = 1.7
    m = mob(math.exp(ell / 2), 0, 0, math.exp(-ell / 2))
    for z in (0.3 + 1j, 2 - 0.5j):
        assert m.apply(z).approx_eq(math.exp(ell) * z, tol=1e-12)


def test_apply_respects_composition():
    import random
    rng = random.Random(3)
    for _ in range(1000):
        m1, m2 = random_sl2(rng), random_sl2(rng)
        z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        lhs = (m1 @ m2).apply(z)
        rhs = m1.apply(m2.apply(z))
        assert lhs.approx_eq(rhs, tol=1e-9)


def test_classify_identity_and_minus_identity():
    assert classify(I2) == MobiusClass.IDENTITY
    assert classify(I2.negate()) == MobiusClass.IDENTITY


def test_classify_elliptic_rotation():
    t = math.pi / 3
    m = mob(cmath.exp(0.5j * t), 0, 0, cmath.exp(-0.5j * t))
    cls = classify(m)
    assert cls == MobiusClass.ELLIPTIC
    # direct trace computation: tr^2 = 4 cos^2(t/2) = 3
    assert abs(cls.trace_squared - 4 * math.cos(t / 2) ** 2) < 1e-12
    assert abs(cls.trace_squared - 3) < 1e-12


def test_classify_parabolic():
    assert classify(mob(1, 1, 0, 1)) == MobiusClass.PARABOLIC


def test_classify_loxodromic_diagonal():
    lam = 1 + math.sqrt(2)
    m = mob(lam, 0, 0, 1 / lam)
    cls = classify(m)
    assert cls == MobiusClass.LOXODROMIC
    # oracle: tr^2 = (lam + 1/lam)^2 = (2 sqrt 2)^2 = 8
    assert abs(cls.trace_squared - (lam + 1 / lam) ** 2) < 1e-12
    assert abs(cls.trace_squared - 8.0) < 1e-12


def test_classify_conjugation_invariant():
    import random
    rng = random.Random(11)
    samples = [
        mob(cmath.exp(0.3j), 0, 0, cmath.exp(-0.3j)),
        mob(1, 2.5, 0, 1),
        mob(2, 0, 0, 0.5),
    ]
    for m in samples:
        for _ in range(20):
            a = random_sl2(rng)
            assert classify(a @ m @ a.inverse()).tag == classify(m).tag


def test_fixed_points_diagonal_and_parabolic():
    m = mob(2, 0, 0, 0.5)
    pts = fixed_points(m)
    assert len(pts) == 2
    vals = sorted(("inf" if p.is_infinity() else p.value()) for p in
                  pts if not p.is_infinity())
    assert any(p.is_infinity() for p in pts)
    assert abs(vals[0]) < 1e-12

    par = mob(1, 1, 0, 1)
    pts = fixed_points(par)
    assert len(pts) == 1 and pts[0].is_infinity()


def test_fixed_points_of_z_to_minus_one_over_z():
    m = mob(0, 1, -1, 0)
    pts = fixed_points(m)
    # quadratic-formula oracle: -z^2 - ... roots of -z^2 - 1 = 0 -> +/- i
    got = sorted(pts, key=lambda p: p.value().imag)
    assert got[0].approx_eq(-1j, tol=1e-12)
    assert got[1].approx_eq(1j, tol=1e-12)


def test_fixed_points_identity_raises():
    with pytest.raises(ValueError):
        fixed_points(I2)


def test_elliptic_about_standard_axis():
    t = 0.8
    m = elliptic_about_axis(ComplexPoint(0), ComplexPoint.infinity(), t)
    ref = mob(cmath.exp(0.5j * t), 0, 0, cmath.exp(-0.5j * t))
    assert m.dist(ref) < 1e-12


def test_elliptic_fixes_axis_and_trace():
    p, q = ComplexPoint(-1.3), ComplexPoint(2.4)
    for t in (0.3, 1.1, 2.9):
        m = elliptic_about_axis(p, q, t)
        assert m.apply(p).approx_eq(p, tol=1e-10)
        assert m.apply(q).approx_eq(q, tol=1e-10)
        assert abs(m.trace_squared() - 4 * math.cos(t / 2) ** 2) < 1e-10


def test_elliptic_degenerate_cases():
    p = ComplexPoint(0.5)
    assert elliptic_about_axis(p, ComplexPoint(2), 0.0).dist(I2) < 1e-12
    full = elliptic_about_axis(p, ComplexPoint(2), 2 * math.pi)
    assert full.dist(I2.negate()) < 1e-10  # -I: trivial on CP^1
    with pytest.raises(ValueError):
        elliptic_about_axis(p, p, 1.0)


def test_elliptic_angle_addition():
    p, q = ComplexPoint(-0.7), ComplexPoint(1.9)
    for t1, t2 in ((0.4, 0.9), (2.0, 1.5)):
        lhs = elliptic_about_axis(p, q, t1) @ elliptic_about_axis(p, q, t2)
        rhs = elliptic_about_axis(p, q, t1 + t2)
        assert lhs.dist(rhs) < 1e-9  # PSL2 actions agree


def test_elliptic_orientation_reversal_inverts():
    p, q = ComplexPoint(-2.0), ComplexPoint(0.3)
    t = 1.234
    m = elliptic_about_axis(p, q, t)
    m_rev = elliptic_about_axis(q, p, t)
    assert m_rev.dist(m.inverse()) < 1e-10


def test_loxodromic_real_translation():
    s = 1.3
    m = loxodromic_along_axis(ComplexPoint(0), ComplexPoint.infinity(), s)
    assert m.dist(mob(math.exp(s / 2), 0, 0, math.exp(-s / 2))) < 1e-12


def test_loxodromic_imaginary_is_elliptic():
    t = 0.77
    p, q = ComplexPoint(-1.0), ComplexPoint(3.0)
    assert loxodromic_along_axis(p, q, 1j * t).dist(
        elliptic_about_axis(p, q, t)) < 1e-12


def test_loxodromic_complex_length_trace():
    s = 0.9 + 0.4j
    m = loxodromic_along_axis(ComplexPoint(0), ComplexPoint.infinity(), s)
    # direct evaluation: tr = 2 cosh(s/2)
    assert abs(m.trace() - 2 * cmath.cosh(s / 2)) < 1e-12


def test_loxodromic_attracting_end():
    p, q = ComplexPoint(-1.0), ComplexPoint(2.0)
    m = loxodromic_along_axis(p, q, 2.0)
    z = ComplexPoint(0.5 + 2j)
    for _ in range(40):
        z = m.apply(z)
    assert z.approx_eq(q, tol=1e-6)


def test_three_point_map():
    m = mobius_to_zero_inf_one(1.0, ComplexPoint.infinity(), 3.0)
    assert m.apply(1.0).approx_eq(0.0, tol=1e-12)
    assert m.apply(ComplexPoint.infinity()).is_infinity()
    assert m.apply(3.0).approx_eq(1.0, tol=1e-12)


@settings(max_examples=100, deadline=None)
@given(finite, finite)
def test_point_equality_projective(z, w):
    if abs(z - w) < 1e-6:
        return
    assert not ComplexPoint(z).approx_eq(ComplexPoint(w), tol=1e-9)
    assert ComplexPoint(z).approx_eq(ComplexPoint(2 * z, 2), tol=1e-12)


def test_json_round_trip():
    m = mob(1.5, 0.25j, -0.5, 1 + 0.125j)
    again = mobius_from_json(mobius_to_json(m))
    assert m.dist(again) < 1e-12
    bad = mobius_to_json(m)
    bad["a"] = [10.0, 0.0]
    with pytest.raises(ValueError):
        mobius_from_json(bad)


def test_h3_action_preserves_plane_for_real_maps():
    m = mob(2, 1, 1, 1)  # real: preserves the vertical plane over R
    w, h = m.apply_h3((0.3, 0.9))
    assert abs(w.imag) < 1e-12 and h > 0
    # boundary consistency: h -> 0 recovers the Moebius action on C
    w0, h0 = m.apply_h3((0.3, 1e-9))
    assert abs(w0 - m.apply(0.3).value()) < 1e-6


def test_h3_action_is_isometric_on_heights():
    # z -> z + 1 and z -> 2z act on H^3 the obvious way
    shift = mob(1, 1, 0, 1)
    assert shift.apply_h3((0.5j, 2.0))[1] == pytest.approx(2.0)
    scale = mob(math.sqrt(2), 0, 0, 1 / math.sqrt(2))
    w, h = scale.apply_h3((1.0, 1.0))
    assert abs(w - 2.0) < 1e-12 and h == pytest.approx(2.0)


def test_uhp_distance_and_geodesic_endpoints():
    assert uhp_distance(1j, 4j) == pytest.approx(math.log(4))
    e1, e2 = geodesic_endpoints(1j, 4j)
    assert abs(e1.value()) < 1e-12 and e2.is_infinity()
    e1, e2 = geodesic_endpoints(-1 + 1j, 1 + 1j)
    assert e1.value().real == pytest.approx(-math.sqrt(2))
    assert e2.value().real == pytest.approx(math.sqrt(2))
