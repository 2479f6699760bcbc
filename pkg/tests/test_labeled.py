import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from discshift.blocking import Matching, validate_itinerary
from discshift.labeled import (AabrArea, SedRadius, all_vippodromes, build_valid_intervals,
                               is_valid_translation, minimize_aabr, minimize_sed,
                               minimize_translation, valid_region)
from oracles import aabr_area, any_order_ok, grid_valid, random_valid, sed_radius_many

SWAP_S = [(0.0, 0.0), (0.0, 2.0)]
SWAP_T = [(0.0, 2.0), (0.0, 0.0)]


def _instance(seed, n):
    rng = np.random.default_rng(seed)
    side = 2.6 * math.sqrt(n) + 2
    return random_valid(rng, n, side), random_valid(rng, n, side)


def test_single_pair_needs_no_shift():
    for opt in (minimize_translation, minimize_aabr, minimize_sed):
        r = opt([(0, 0)], [(0, 0)])
        assert r.optimal and r.v == (0.0, 0.0)
    assert minimize_aabr([(0, 0)], [(0, 0)]).value == pytest.approx(4.0)
    assert minimize_sed([(0, 0)], [(0, 0)]).value == 0.0


def test_aabr_row_of_two():
    d = 5.0
    r = minimize_aabr([(0, 0), (d, 0)], [(0, 0), (d, 0)])
    assert r.v == (0.0, 0.0) and r.value == pytest.approx((2 + d) * 2)


def test_aabr_forced_shift_formula():
    area = AabrArea([(0, 0)], [(0, 0)])
    for d in (0.5, 3.0, 10.0):
        assert area((d, 0)) == pytest.approx((2 + d) * 2)


def test_aabr_area_matches_oracle_1e5():
    rng = np.random.default_rng(17)
    S, T = rng.uniform(-10, 10, (6, 2)), rng.uniform(-10, 10, (6, 2))
    V = rng.uniform(-30, 30, (100_000, 2))
    area = AabrArea(S, T)
    got = area.width(V[:, 0]) * area.height(V[:, 1])
    assert np.allclose(got, aabr_area(S, T, V), rtol=1e-12, atol=1e-9)


def test_tangent_swap_is_infeasible():
    assert len(all_vippodromes(SWAP_S, SWAP_T)) == 4
    for opt in (minimize_translation, minimize_aabr, minimize_sed):
        r = opt(SWAP_S, SWAP_T)
        assert r.status == "infeasible" and r.v is None and r.itinerary is None
    xs = np.linspace(-50, 50, 100)
    X, Y = np.meshgrid(xs, xs)
    assert not grid_valid(np.array(SWAP_S), np.array(SWAP_T), [(0, 0), (1, 1)], X, Y).any()


def test_sed_nested_case():
    r = minimize_sed([(-3, 0), (3, 0)], [(-1, 0), (1, 0)])
    assert r.details["case"] == "nested"
    assert r.v == pytest.approx((0, 0)) and r.value == pytest.approx(3.0)


def test_shortest_shift_example():
    # the swap along x becomes feasible once the targets clear each other
    S = [(0.0, 0.0), (4.0, 0.0)]
    T = [(4.0, 0.0), (0.0, 0.0)]
    r = minimize_translation(S, T)
    assert r.optimal
    assert validate_itinerary(S, T, None, r.v, r.itinerary)
    assert math.hypot(*r.v) == pytest.approx(r.value)
    xs = np.linspace(-8, 8, 801)
    X, Y = np.meshgrid(xs, xs)
    ok = grid_valid(np.array(S), np.array(T), [(0, 0), (1, 1)], X, Y)
    assert r.value <= np.hypot(X[ok], Y[ok]).min() + 1e-9


def test_matching_changes_the_problem():
    S = [(0.0, 0.0), (4.0, 0.0)]
    T = [(0.0, 0.0), (4.0, 0.0)]
    assert minimize_translation(S, T).value == 0.0
    swapped = minimize_translation(S, T, Matching.from_targets([1, 0]))
    assert swapped.value > 0


@settings(deadline=None, max_examples=25)
@given(st.integers(0, 2**32 - 1), st.integers(2, 4))
def test_interval_endpoints_are_valid(seed, n):
    S, T = _instance(seed, n)
    vips, regions = valid_region(S, T)
    for vip, reg in zip(vips, regions):
        for lo, hi in reg.intervals:
            for s in (lo, hi, (lo + hi) / 2 if math.isfinite(lo + hi) else None):
                if s is not None and math.isfinite(s):
                    # the valid set is closed, so endpoints themselves are valid
                    assert is_valid_translation(S, T, None, vip.point_at(s))


def test_valid_intervals_match_pointwise_labels():
    S, T = _instance(12, 4)
    vips = all_vippodromes(S, T)
    for k in range(0, len(vips), 3):
        reg = build_valid_intervals(k, vips, S, T)
        for s in np.linspace(-25, 25, 301):
            ends = [e for iv in reg.intervals for e in iv if math.isfinite(e)]
            if all(abs(s - e) > 1e-6 for e in ends):
                assert reg.contains(s) == is_valid_translation(S, T, None, vips[k].point_at(s))


@settings(deadline=None, max_examples=100)
@given(st.integers(0, 2**32 - 1))
def test_aabr_area_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    S, T = rng.uniform(-10, 10, (5, 2)), rng.uniform(-10, 10, (4, 2))
    V = rng.uniform(-20, 20, (20, 2))
    area = AabrArea(S, T)
    assert [area(v) for v in V] == pytest.approx(aabr_area(S, T, V).tolist())
    assert all(area(v) >= area.floor - 1e-9 for v in V)


@settings(deadline=None, max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_sed_radius_matches_oracle_and_is_convex(seed):
    rng = np.random.default_rng(seed)
    S, T = rng.uniform(-10, 10, (5, 2)), rng.uniform(-10, 10, (4, 2))
    rad = SedRadius(S, T)
    V = rng.uniform(-20, 20, (20, 2))
    P = np.concatenate([np.broadcast_to(S, (20, 5, 2)), T[None] + V[:, None]], 1)
    assert [rad(v) for v in V] == pytest.approx(sed_radius_many(P).tolist(), abs=1e-9)
    a, b = V[0], V[1]
    for lam in np.linspace(0, 1, 11):
        assert rad(lam * a + (1 - lam) * b) <= lam * rad(a) + (1 - lam) * rad(b) + 1e-9
    assert rad(rad.concentric) == pytest.approx(rad.floor)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_optimizers_against_grid(seed):
    S, T = _instance(seed, 3)
    pairs = [(0, 0), (1, 1), (2, 2)]
    a, b, c = minimize_translation(S, T), minimize_aabr(S, T), minimize_sed(S, T)
    for r in (a, b, c):
        assert r.optimal and validate_itinerary(S, T, None, r.v, r.itinerary)
    H = 1.25 * max(math.hypot(*r.v) for r in (a, b, c)) + 2
    xs = np.linspace(-H, H, 300)
    X, Y = np.meshgrid(xs, xs)
    ok = grid_valid(S, T, pairs, X, Y)
    V = np.stack([X[ok], Y[ok]], 1)
    diag = 2 * H / 299 * math.sqrt(2)
    P = np.concatenate([np.broadcast_to(S, (len(V), 3, 2)), T[None] + V[:, None]], 1)
    area = AabrArea(S, T)
    lip = math.sqrt(2) * max(area.width(b.v[0]), area.height(b.v[1])) + diag
    for got, grid, scale in ((a.value, np.hypot(V[:, 0], V[:, 1]).min(), 1.0),
                             (b.value, aabr_area(S, T, V).min(), lip),
                             (c.value, sed_radius_many(P).min(), 1.0)):
        assert got <= grid + 1e-9
        assert grid - got <= scale * diag


def test_brute_force_agrees_at_optimum():
    S, T = _instance(8, 4)
    r = minimize_translation(S, T)
    assert any_order_ok(S, T, [(i, i) for i in range(4)], r.v)
