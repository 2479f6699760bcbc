import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from discshift.blocking import validate_itinerary
from discshift.labeled import AabrArea, SedRadius
from discshift.unlabeled import (bad_vippodromes, bound_translation, delta_matching,
                                 feasibility_translation, generic_direction, good_direction,
                                 is_generic, min_aabr_on_ray, min_sed_on_line,
                                 multi_direction_optimize, optimize_direction, ray_intervals,
                                 shortest_valid_on_ray)
from discshift.vippodrome import vip_interior
from oracles import random_valid, seg_dist


def _instance(seed, n, side=None):
    rng = np.random.default_rng(seed)
    side = side or 2.6 * math.sqrt(n)
    return random_valid(rng, n, side), random_valid(rng, n, side), rng


def bad_mask(ctx, ts):
    """True where some later pair must move before an earlier one."""
    As, At = ctx.S[ctx.order_s], ctx.T[ctx.order_t]
    V = np.asarray(ts)[:, None] * ctx.delta
    m = np.zeros(len(V), dtype=bool)
    for k in range(ctx.n):
        for l in range(k):
            d1 = seg_dist(As[k], As[l], At[l] + V)
            d2 = seg_dist(At[l] + V, As[k], At[k] + V)
            m |= (d1 < 2 - 1e-9) | (d2 < 2 - 1e-9)
    return m


def test_matching_example():
    S = [(0, 0), (3, 0)]
    T = [(0, 5), (3, 5)]
    ctx = delta_matching(S, T, (1, 0))
    assert ctx.pairs == ((1, 1), (0, 0))
    ctx = delta_matching(S, T, (-1, 0))
    assert ctx.pairs == ((0, 0), (1, 1))


def test_equal_projection_goes_top_first():
    ctx = delta_matching([(0, 0), (0, 3)], [(0, 0), (0, 3)], (1, 0))
    assert ctx.pairs == ((1, 1), (0, 0))


def test_non_generic_rejected():
    S = [(0, 0), (2, 0)]
    T = [(0, 10), (5, 10)]
    assert not is_generic(S, T, (0, 1))
    with pytest.raises(ValueError, match="non-generic direction"):
        delta_matching(S, T, (0, 1))
    d = generic_direction(S, T, 0)
    assert is_generic(S, T, d) and math.hypot(*d) == pytest.approx(1)


def test_good_direction_examples():
    # a touching horizontal pair has both tangents vertical; the widest gap is centred on horizontal
    d = good_direction([(0, 0), (2, 0)], [(0, 10), (5, 10)])
    assert abs(d[0]) == pytest.approx(1)
    assert tuple(good_direction([(0, 0)], [(0, 0)])) == (1.0, 0.0)


@settings(deadline=None, max_examples=50)
@given(st.integers(0, 2**32 - 1), st.integers(2, 10), st.floats(0, 2 * math.pi))
def test_matching_is_rotation_equivariant(seed, n, ang):
    S, T, rng = _instance(seed, n)
    delta = generic_direction(S, T, rng)
    R = np.array([[math.cos(ang), -math.sin(ang)], [math.sin(ang), math.cos(ang)]])
    a = delta_matching(S, T, delta)
    b = delta_matching(S @ R.T, T @ R.T, R @ delta)
    assert a.pairs == b.pairs


def test_bad_set_size_and_shape():
    S, T, rng = _instance(3, 7)
    ctx = delta_matching(S, T, generic_direction(S, T, rng))
    bad = bad_vippodromes(ctx)
    assert len(bad) == 7 * 6
    assert np.all(bad.later > bad.earlier)
    vip = bad[5]
    assert vip.pair_ids == (int(bad.later[5]), int(bad.earlier[5]))


@settings(deadline=None, max_examples=40)
@given(st.integers(0, 2**32 - 1), st.integers(2, 8))
def test_line_intervals_match_membership(seed, n):
    S, T, rng = _instance(seed, n)
    ctx = delta_matching(S, T, generic_direction(S, T, rng))
    bad = bad_vippodromes(ctx)
    lo, hi = bad.line_intervals()
    ts = np.linspace(-40, 40, 801)
    for k in range(len(bad)):
        vip = bad[k]
        for t in ts:
            inside = vip_interior(vip, t * ctx.delta)
            if np.isnan(lo[k]):
                assert not inside or abs(vip.predicate_distance(t * ctx.delta) - 2) < 1e-6
            elif min(abs(t - lo[k]), abs(t - hi[k])) > 1e-6:
                assert inside == (lo[k] < t < hi[k])


@settings(deadline=None, max_examples=40)
@given(st.integers(0, 2**32 - 1), st.integers(1, 12))
def test_ray_classification_matches_pointwise(seed, n):
    S, T, rng = _instance(seed, n)
    ctx = delta_matching(S, T, generic_direction(S, T, rng))
    for line in (False, True):
        ri = ray_intervals(ctx, line=line)
        ends = [e for iv in ri.valid for e in iv if math.isfinite(e)]
        ts = np.linspace(-30 if line else 0, 30, 2001)
        ts = np.array([t for t in ts if all(abs(t - e) > 1e-6 for e in ends)])
        assert np.array_equal(np.array([ri.is_valid(t) for t in ts]), ~bad_mask(ctx, ts))


@settings(deadline=None, max_examples=40)
@given(st.integers(0, 2**32 - 1), st.integers(1, 20))
def test_feasibility_translation_validates(seed, n):
    S, T, rng = _instance(seed, n)
    ctx = delta_matching(S, T, generic_direction(S, T, rng))
    v = feasibility_translation(ctx)
    assert validate_itinerary(S, T, ctx.matching, v, ctx.itinerary(v))


@settings(deadline=None, max_examples=40)
@given(st.integers(0, 2**32 - 1), st.integers(1, 20))
def test_bound_translation_clears_every_bad_region(seed, n):
    S, T, _ = _instance(seed, n)
    delta = good_direction(S, T)
    if not is_generic(S, T, delta):
        return
    v = bound_translation(S, T)
    ctx = delta_matching(S, T, delta)
    assert not any(vip_interior(vip, v) for vip in bad_vippodromes(ctx))
    assert validate_itinerary(S, T, ctx.matching, v, ctx.itinerary(v))


def test_cross_bound_example():
    from discshift.instances import generate
    inst = generate("cross", 10)
    v = bound_translation(inst.start, inst.target)
    ctx = delta_matching(inst.start, inst.target, good_direction(inst.start, inst.target))
    assert validate_itinerary(inst.start, inst.target, ctx.matching, v, ctx.itinerary(v))


@pytest.mark.parametrize("seed", range(6))
def test_ray_optimizers_against_scan(seed):
    S, T, rng = _instance(seed, 8)
    ctx = delta_matching(S, T, generic_direction(S, T, rng))
    short = shortest_valid_on_ray(ctx)
    ts = np.linspace(0, max(2 * short.value + 5, 10), 20_001)
    ok = ~bad_mask(ctx, ts)
    step = ts[1] - ts[0]
    first = ts[ok][0]
    assert short.value <= first + 1e-9 and first - short.value <= step
    assert validate_itinerary(S, T, ctx.matching, short.v, short.itinerary)

    aabr = min_aabr_on_ray(ctx)
    area = AabrArea(S, T)
    ts = np.linspace(0, 60, 20_001)
    ok = ~bad_mask(ctx, ts)
    scan = min(area(t * ctx.delta) for t in ts[ok])
    assert aabr.value <= scan + 1e-9
    assert aabr.value == pytest.approx(area(aabr.v))

    sed = min_sed_on_line(ctx)
    rad = SedRadius(S, T)
    ts = np.linspace(-60, 60, 20_001)
    ok = ~bad_mask(ctx, ts)
    scan = min(rad(t * ctx.delta) for t in ts[ok])
    assert sed.value <= scan + 1e-9
    assert scan - sed.value <= ts[1] - ts[0]
    assert validate_itinerary(S, T, ctx.matching, sed.v, sed.itinerary)


def test_sed_nested_case_on_line():
    S = [(-6.0, 0.0), (6.0, 0.0), (0.0, 6.0)]
    T = [(-1.0, 0.5), (1.0, 0.5), (0.0, 2.5)]
    r = optimize_direction(S, T, generic_direction(S, T, 1), "sed")
    assert r.details["case"] == "nested"
    assert r.value == pytest.approx(SedRadius(S, T).floor)


def test_multi_direction_prefix_and_validation():
    S, T, _ = _instance(21, 10)
    a = multi_direction_optimize(S, T, 5, "shortest", seed=4)
    b = multi_direction_optimize(S, T, 12, "shortest", seed=4)
    assert b.details["per_direction"][:5] == a.details["per_direction"]
    assert b.value <= a.value
    assert b.value == min(b.details["per_direction"])
    i = b.details["direction_index"]
    assert b.details["per_direction"][i] == b.value
    assert b.details["per_direction"].index(b.value) == i


def test_multi_direction_argument_errors():
    with pytest.raises(ValueError):
        multi_direction_optimize([(0, 0)], [(0, 0)], 0)
    with pytest.raises(ValueError):
        multi_direction_optimize([(0, 0)], [(0, 0)], 3, "perimeter")
