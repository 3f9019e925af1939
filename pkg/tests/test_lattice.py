from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thetaforge.lattice import QLattice, canonical_ray, index, plane_reduce, primitive

STANDARD = QLattice.standard(1)


@lru_cache(maxsize=None)
def _longest_chain(v: tuple[int, int]) -> int:
    """Most nonzero summands from the quadrant adding up to v."""
    if v == (0, 0):
        return 0
    best = 0
    for a in range(v[0] + 1):
        for b in range(v[1] + 1):
            if (a, b) != (0, 0):
                best = max(best, 1 + _longest_chain((v[0] - a, v[1] - b)))
    return best


def test_pairing():
    assert STANDARD.pair((1, 0), (0, 1)) == 1
    assert STANDARD.pair((3, -2), (3, -2)) == 0
    for n in (1, 2, 3):
        assert QLattice.standard(n).pair((1, 0), (0, 1)) == n


def test_order_examples():
    assert STANDARD.order((0, 0)) == 0
    assert STANDARD.order((2, 3)) == 5
    assert STANDARD.order((1, 0)) == 1
    with pytest.raises(ValueError):
        STANDARD.order((1, -1))


@pytest.mark.parametrize("v", [(a, b) for a in range(5) for b in range(5)])
def test_order_matches_longest_chain(v):
    assert STANDARD.order(v) == _longest_chain(v)


def test_index_and_primitive():
    assert index((2, 4)) == 2
    assert index((1, 1)) == 1
    assert index((0, 6)) == 6
    assert primitive((0, 6)) == (0, 1)
    assert primitive((-4, 6)) == (-2, 3)


def test_rejects_bad_forms():
    with pytest.raises(ValueError):
        QLattice.from_omega([[0, 1], [1, 0]], [(1, 0), (0, 1)])
    with pytest.raises(ValueError):
        QLattice.from_omega([[0, 1], [-1, 0]], [(1, 0), (2, 0)])


def test_fractional_form_has_integral_sublattice():
    lat = QLattice.from_omega([[0, Fraction(1, 2)], [Fraction(-1, 2), 0]], [(1, 0), (0, 1)])
    assert lat.D == 2
    assert not lat.in_L0((1, 0))
    assert lat.in_L0((2, 0))
    for u in lat.L0_basis:
        for e in ((1, 0), (0, 1)):
            assert lat.pair(u, e).denominator == 1


def test_skew_cone_order():
    lat = QLattice.from_omega([[0, 1], [-1, 0]], [(1, 0), (1, 2)])
    assert lat.in_cone((1, 1))
    assert not lat.in_cone((0, 1))
    assert lat.height((1, 1)) == 1
    assert lat.order((2, 1)) == 2


def test_plane_reduce():
    chart = plane_reduce(STANDARD, [(1, 0), (0, 1)])
    assert chart.phi((1, 0)) == (0, -1)
    assert chart.phi((0, 1)) == (1, 0)
    # the wall for (1, 1) lies on y1 + y2 = 0
    assert chart.pair_chart((1, 1), (1, -1)) == 0
    with pytest.raises(ValueError):
        plane_reduce(STANDARD, [(1, 0), (2, 0)])


def test_plane_reduce_in_rank_four():
    omega = [[0, 1, 1, 0], [-1, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]]
    lat = QLattice.from_omega(omega, [(1, 0, 0, 0), (0, 1, 0, 0)])
    chart = plane_reduce(lat, [(1, 0, 0, 0), (0, 1, 0, 0)])
    assert chart.n == 1


vectors = st.tuples(st.integers(-6, 6), st.integers(-6, 6))
cone_vectors = st.tuples(st.integers(0, 6), st.integers(0, 6))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 3), vectors, vectors)
def test_chart_preserves_crossing_signs(n, v, x):
    lat = QLattice.standard(n)
    chart = plane_reduce(lat, [(1, 0), (0, 1)])
    if v == (0, 0):
        return
    direct = lat.pair(v, x)
    in_chart = chart.pair_chart(v, chart.phi(x))
    assert (direct > 0) == (in_chart > 0)
    assert (direct == 0) == (in_chart == 0)


@settings(max_examples=100, deadline=None)
@given(cone_vectors, cone_vectors)
def test_order_is_superadditive(v, w):
    for lat in (STANDARD, QLattice.from_omega([[0, 1], [-1, 0]], [(2, 1), (1, 3)])):
        if lat.in_cone(v) and lat.in_cone(w):
            s = (v[0] + w[0], v[1] + w[1])
            assert lat.order(s) >= lat.order(v) + lat.order(w)


@settings(max_examples=100, deadline=None)
@given(vectors)
def test_canonical_ray_is_primitive_and_parallel(v):
    if v == (0, 0):
        return
    r = canonical_ray(v)
    assert index(r) == 1
    assert r[0] * v[1] - r[1] * v[0] == 0
    assert r[0] * v[0] + r[1] * v[1] > 0
