import math
import random

import numpy as np
import pytest

from cp1lab.moebius import MobiusMap, MobiusClass, classify
from cp1lab.fuchsian import (
    CURVE_CATALOG,
    LETTER_ORDER,
    SYSTOLE,
    MarkedGroup,
    axis_of,
    bolza_group,
    conjugate_axes,
    geodesic_length,
    invert_word,
    is_elementary_pair,
    reduce_word,
    separating_lifts,
    word_from_json,
    word_to_json,
)

I2 = MobiusMap.identity()


@pytest.fixture(scope="module")
def group():
    return bolza_group()


def random_word(rng, n):
    w = []
    while len(w) < n:
        letter = rng.choice(LETTER_ORDER)
        if w and w[-1] == -letter:
            continue
        w.append(letter)
    return tuple(w)


def test_free_reduction():
    assert reduce_word((1, -1)) == ()
    assert reduce_word((1, 2, -2, -1, 3)) == (3,)
    assert reduce_word((1, 2, 3)) == (1, 2, 3)
    assert invert_word((1, -2, 3)) == (-3, 2, -1)


def test_relator_defect(group):
    defect = group.evaluate_word(group.relator).dist(I2)
    assert defect < 1e-10


def test_generator_traces_are_systolic(group):
    # regular-octagon trigonometry oracle: cosh(len/2) = cot(pi/8) = 1+sqrt2
    expected = 2.0 * (1.0 + math.sqrt(2.0))
    for g in group.gens:
        assert abs(abs(g.trace()) - expected) < 1e-10
        assert abs(g.trace().imag) < 1e-12


def test_generators_are_real_and_loxodromic(group):
    for g in group.gens:
        for entry in (g.a, g.b, g.c, g.d):
            assert abs(entry.imag) < 1e-12
        assert classify(g) == MobiusClass.LOXODROMIC


def test_generator_pair_is_nonelementary(group):
    a1, b1 = group.gens[0], group.gens[1]
    assert not is_elementary_pair(a1, b1)
    comm = a1 @ b1 @ a1.inverse() @ b1.inverse()
    assert abs(comm.trace() - 2.0) > 0.1


def test_all_generator_pairs_nonelementary(group):
    for i in range(4):
        for j in range(i + 1, 4):
            gi, gj = group.gens[i], group.gens[j]
            comm = gi @ gj @ gi.inverse() @ gj.inverse()
            assert abs(comm.trace() - 2.0) > 0.1


def test_evaluate_word_basics(group):
    assert group.evaluate_word(()).dist(I2) < 1e-15
    w = (1, 2, -3)
    ww = w + invert_word(w)
    assert group.evaluate_word(ww).dist(I2) < 1e-10


def test_evaluate_word_homomorphism(group):
    rng = random.Random(5)
    for _ in range(500):
        w1 = random_word(rng, rng.randint(1, 5))
        w2 = random_word(rng, rng.randint(1, 5))
        lhs = group.evaluate_word(reduce_word(w1 + w2))
        rhs = group.evaluate_word(w1) @ group.evaluate_word(w2)
        scale = max(1.0, abs(rhs.a), abs(rhs.b), abs(rhs.c), abs(rhs.d))
        assert lhs.dist(rhs) < 1e-9 * scale


def test_geodesic_length_of_generator(group):
    # trace oracle: 2 arccosh(1 + sqrt 2), digits frozen from mpmath
    assert geodesic_length(group, (1,)) == pytest.approx(SYSTOLE, abs=1e-10)
    assert SYSTOLE == pytest.approx(3.0571418389619963, abs=1e-12)


def test_geodesic_length_invariances(group):
    w = (1, 2, -3, 2)
    assert geodesic_length(group, w) == pytest.approx(
        geodesic_length(group, invert_word(w)), abs=1e-10)
    # conjugacy invariance
    conj = reduce_word((4, 2) + w + invert_word((4, 2)))
    assert geodesic_length(group, conj) == pytest.approx(
        geodesic_length(group, w), abs=1e-9)


def test_geodesic_length_rejects_identity(group):
    with pytest.raises(ValueError):
        geodesic_length(group, ())


def test_enumerate_zero_and_one(group):
    elems = group.enumerate_elements(0)
    assert len(elems) == 1 and elems[0][0] == ()
    elems = group.enumerate_elements(1)
    assert len(elems) == 9
    mats = [m for _w, m in elems]
    for i in range(9):
        for j in range(i + 1, 9):
            assert mats[i].dist(mats[j]) > 1e-6


def test_enumerate_depth_two_count(group):
    # brute-force dedup oracle: no relator coincidences until length 4
    assert len(group.enumerate_elements(2)) == 1 + 8 + 56


def test_enumerate_deterministic_order(group):
    elems = group.enumerate_elements(2)
    words = [w for w, _ in elems]
    key = {letter: i for i, letter in enumerate(LETTER_ORDER)}
    ranked = [(len(w), tuple(key[l] for l in w)) for w in words]
    assert ranked == sorted(ranked)


def test_no_elliptic_or_parabolic_elements(group):
    # cocompact torsion-free: every nontrivial element is loxodromic
    mats, _starts = group.element_arrays(6)
    tr = np.abs(mats[1:, 0, 0] + mats[1:, 1, 1])
    assert tr.min() > 2.0 + 0.1


def test_element_arrays_match_enumeration(group):
    mats, starts = group.element_arrays(3)
    elems = group.enumerate_elements(3)
    assert len(mats) == len(elems)
    assert list(starts) == [0, 1, 9, 65]


def test_axis_of_generator(group):
    g = group.gens[0]
    ax = axis_of(g)
    # endpoints on the real line, attracting end actually attracts
    assert abs(ax.start.value().imag) < 1e-9
    assert abs(ax.end.value().imag) < 1e-9
    z = g.apply(g.apply(2j))
    big = g @ g @ g @ g
    assert big.apply(2j).approx_eq(ax.end, tol=1e-2)
    assert ax.translation_length == pytest.approx(SYSTOLE, abs=1e-10)


def test_separating_lifts_empty_cases(group):
    z0 = group.basepoint
    assert separating_lifts(group, (1,), z0, z0, 4) == []
    # short segment near the basepoint crosses nothing
    assert separating_lifts(group, (1,), z0 * 1.01, z0 * 1.02, 3) == []


def test_separating_lifts_cross_straddled_axis(group):
    a1 = group.gens[0]
    ax = axis_of(a1)
    x, y = _straddling_points(ax, 0.4)
    lifts = separating_lifts(group, (1,), x, y, 4)
    assert len(lifts) >= 1
    sigs = {_axis_sig(a) for a in lifts}
    assert _axis_sig(ax) in sigs or _axis_sig(ax.reversed()) in sigs


def test_separating_lifts_own_axis_not_crossed_by_translate(group):
    # half-planes are convex: the segment from x to a1 x stays on one side
    # of axis(a1), so that axis never separates the pair
    a1 = group.gens[0]
    ax = axis_of(a1)
    x = _point_near_axis(ax, offset=0.35)
    y = a1.apply(x).value()
    sigs = {_axis_sig(a) for a in separating_lifts(group, (1,), x, y, 4)}
    assert _axis_sig(ax) not in sigs and _axis_sig(ax.reversed()) not in sigs


def test_separating_lifts_stable_under_depth(group):
    a1 = group.gens[0]
    ax = axis_of(a1)
    x, y = _straddling_points(ax, 0.4)
    lifts4 = separating_lifts(group, (1,), x, y, 4)
    lifts6 = separating_lifts(group, (1,), x, y, 6)
    assert len(lifts4) >= 1
    assert [_axis_sig(a) for a in lifts4] == [_axis_sig(a) for a in lifts6]


def test_separating_lifts_orientation(group):
    from cp1lab.fuchsian import _side_sign
    a1 = group.gens[0]
    ax = axis_of(a1)
    x, y = _straddling_points(ax, 0.4)
    for lift in separating_lifts(group, (1,), x, y, 4):
        assert _side_sign(lift.start, lift.end, y) > 0
        assert _side_sign(lift.start, lift.end, x) < 0


def test_conjugate_axes_dedup(group):
    axes = conjugate_axes(group, (1,), 2)
    sigs = [_axis_sig(a) for a, _w in axes]
    assert len(sigs) == len(set(sigs))
    # conjugating by the curve itself fixes the axis: fewer axes than elements
    assert len(axes) < len(group.enumerate_elements(2))


def test_group_json_round_trip(group):
    again = MarkedGroup.from_json(group.to_json())
    for g1, g2 in zip(group.gens, again.gens):
        assert g1.dist(g2) < 1e-12
    assert again.relator == group.relator
    assert word_from_json(word_to_json((1, -2, 3))) == (1, -2, 3)


def _point_near_axis(ax, offset):
    """A point at a small offset to one side of the axis."""
    if ax.start.is_infinity() or ax.end.is_infinity():
        u = (ax.end if ax.start.is_infinity() else ax.start).value().real
        return complex(u + offset, 1.0)
    u, v = ax.start.value().real, ax.end.value().real
    center = 0.5 * (u + v)
    radius = 0.5 * abs(v - u)
    return complex(center + offset * radius * 0.3, radius * (1.0 + offset))


def _straddling_points(ax, offset):
    """Points on opposite sides of the axis, near its summit."""
    if ax.start.is_infinity() or ax.end.is_infinity():
        u = (ax.end if ax.start.is_infinity() else ax.start).value().real
        return complex(u - offset, 1.0), complex(u + offset, 1.1)
    u, v = ax.start.value().real, ax.end.value().real
    center = 0.5 * (u + v)
    radius = 0.5 * abs(v - u)
    inner = complex(center + 0.05 * radius, radius * (1.0 - offset))
    outer = complex(center - 0.03 * radius, radius * (1.0 + offset))
    return inner, outer


def _axis_sig(ax, tol=1e-7):
    vals = []
    for p in (ax.start, ax.end):
        vals.append("inf" if p.is_infinity() else round(p.value().real / tol))
    return tuple(vals)
