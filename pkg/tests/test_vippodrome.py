import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from discshift.blocking import build_tbg
from discshift.vippodrome import (boundary_extrema, boundary_line_hits, boundary_pair_hits,
                                  make_vippodrome, vip_contains, vip_interior)
from oracles import random_valid, seg_dist


def _pred(vip, v):
    v = np.asarray(v, float)
    if vip.kind == 1:
        return float(seg_dist(vip.a_start, vip.b_start, np.add(vip.b_target, v)))
    return float(seg_dist(np.add(vip.b_target, v), vip.a_start, np.add(vip.a_target, v)))


@st.composite
def pair_of_pairs(draw):
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    S = random_valid(rng, 2, 12.0)
    T = random_valid(rng, 2, 12.0)
    kind = draw(st.sampled_from([1, 2]))
    return make_vippodrome((S[0], T[0]), (S[1], T[1]), kind), rng


def test_kind1_example():
    vip = make_vippodrome(((0, 0), (9, 9)), ((4, 0), (0, 0)), 1)
    assert vip.wedge.apex == (0.0, 0.0)
    assert vip.wedge.opening == pytest.approx(math.pi / 3)
    assert vip.wedge.bisector == pytest.approx((-1, 0))
    assert vip.arc_center == (0.0, 0.0) and vip.arc_radius == 2
    assert vip_contains(vip, (0, 0))
    # oracle distance 3.9968 > 2
    assert not vip_contains(vip, (0, 100))
    assert vip_contains(vip, (-50, 0))


def test_tangent_pair_is_a_shifted_halfplane():
    vip = make_vippodrome(((0, 0), (0, 0)), ((2, 0), (5, 5)), 1)
    assert vip.half_arc == pytest.approx(0.0)
    assert vip.wedge.opening == pytest.approx(math.pi)
    # boundary is the line through the arc point, perpendicular to the axis
    p = vip.point_at(0.0)
    for s in (-7.0, 3.0, 11.0):
        q = vip.point_at(s)
        assert np.dot(q - p, vip.axis) == pytest.approx(0.0, abs=1e-12)


@settings(deadline=None, max_examples=200)
@given(pair_of_pairs())
def test_membership_matches_predicate_and_shape(data):
    vip, rng = data
    for v in rng.uniform(-20, 20, (50, 2)):
        d = _pred(vip, v)
        assert vip_contains(vip, v) == (d <= 2 + 1e-9)
        assert vip_interior(vip, v) == (d < 2 - 1e-9)
        w = vip.wedge_distance(v)
        if abs(d - 2) > 1e-7:
            assert (w < 2) == (d < 2)


@settings(deadline=None, max_examples=100)
@given(pair_of_pairs(), st.floats(-30, 30))
def test_boundary_points_sit_on_the_constraint(data, s):
    vip, _ = data
    p = vip.point_at(s)
    assert abs(_pred(vip, p) - 2) <= 1e-7
    assert vip.param_of(p) == pytest.approx(s, abs=1e-7)


def test_edges_follow_interiors():
    rng = np.random.default_rng(4)
    S, T = random_valid(rng, 4, 9.0), random_valid(rng, 4, 9.0)
    vips = {(a, b, k): make_vippodrome((S[a], T[a]), (S[b], T[b]), k)
            for a in range(4) for b in range(4) if a != b for k in (1, 2)}
    for v in rng.uniform(-8, 8, (200, 2)):
        edges = build_tbg(S, T, None, v).edges
        for a in range(4):
            for b in range(4):
                if a != b:
                    inside = vip_interior(vips[a, b, 1], v) or vip_interior(vips[a, b, 2], v)
                    assert ((a, b) in edges) == inside


def test_line_hits_on_straight_pieces():
    vip = make_vippodrome(((0, 0), (0, 0)), ((0, 10), (0, 0)), 1)
    hits = boundary_line_hits(vip, (-10, 0), (1, 0))
    xs = [h.point[0] for h in hits]
    # the arc ends above y=0, so the line meets the straight pieces where
    # 10|x| / sqrt(100 + x^2) = 2
    assert xs == pytest.approx([-2 / math.sqrt(0.96), 2 / math.sqrt(0.96)])
    assert all(h.piece != "arc" for h in hits)


def test_collinear_overlap_raises():
    vip = make_vippodrome(((0, 0), (0, 0)), ((2, 0), (0, 0)), 1)
    base = vip.point_at(5.0)
    along = vip.point_at(9.0) - base
    with pytest.raises(ValueError, match="collinear overlap"):
        boundary_line_hits(vip, base, along)


@settings(deadline=None, max_examples=60)
@given(pair_of_pairs())
def test_ray_hits_match_dense_scan(data):
    vip, rng = data
    ang = rng.uniform(0, 2 * math.pi)
    d = np.array([math.cos(ang), math.sin(ang)])
    o = rng.uniform(-5, 5, 2)
    ts = np.linspace(0, 60, 10_001)
    inside = np.array([_pred(vip, o + t * d) <= 2 for t in ts])
    flips = ts[1:][inside[1:] != inside[:-1]]
    hits = [h.t for h in boundary_line_hits(vip, o, d, ray=True) if h.t <= 60]
    # grazing hits produce no sign change; everything else pairs up
    transversal = [t for t in hits if (_pred(vip, o + (t - 1e-4) * d) <= 2) != (_pred(vip, o + (t + 1e-4) * d) <= 2)]
    assert len(transversal) == len(flips)
    for t, f in zip(transversal, flips):
        assert abs(t - f) <= 60 / 10_000 + 1e-9


def test_opposite_disjoint_regions_have_no_hits():
    # apexes (0,0) and (100,0), opening away from each other
    v1 = make_vippodrome(((0, 0), (0, 0)), ((10, 0), (0, 0)), 1)
    v2 = make_vippodrome(((100, 0), (0, 0)), ((90, 0), (0, 0)), 1)
    assert boundary_pair_hits(v1, v2) == []


def test_same_pair_kinds_share_an_arc():
    a = ((0.0, 0.0), (1.0, 5.0))
    b = ((4.0, 0.0), (4.0, 5.0))
    v1, v2 = make_vippodrome(a, b, 1), make_vippodrome(a, b, 2)
    assert v1.arc_center == v2.arc_center
    hits = boundary_pair_hits(v1, v2)
    assert any(h.overlap for h in hits)


@settings(deadline=None, max_examples=300)
@given(pair_of_pairs(), pair_of_pairs())
def test_pair_hits_at_most_four_and_on_both(d1, d2):
    v1, v2 = d1[0], d2[0]
    hits = boundary_pair_hits(v1, v2)
    assert len(hits) <= 4
    for h in hits:
        assert abs(_pred(v1, h.point) - 2) <= 1e-7
        assert abs(_pred(v2, h.point) - 2) <= 1e-7


def test_extrema_examples():
    vip = make_vippodrome(((0, 0), (0, 0)), ((5, 0), (0, 0)), 1)
    ext = boundary_extrema(vip, vip.arc_center)
    assert [e.piece for e in ext] == ["arc"] and ext[0].param == 0.0
    far = np.asarray(vip.arc_center) - 30 * np.asarray(vip.axis)
    ext = boundary_extrema(vip, far)
    assert len(ext) == 1 and ext[0].param == pytest.approx(0.0)


@settings(deadline=None, max_examples=100)
@given(pair_of_pairs())
def test_extrema_beat_their_neighbours(data):
    vip, rng = data
    p = rng.uniform(-15, 15, 2)
    for e in boundary_extrema(vip, p):
        d0 = math.dist(vip.point_at(e.param), p)
        for step in (1e-4, -1e-4):
            assert d0 <= math.dist(vip.point_at(e.param + step), p) + 1e-12
