"""Unlabeled version: a direction fixes both the matching and the move order.

Sorting both point sets from right to left along a direction ``delta`` pairs
them rank by rank, and moving them in that order only fails where a later pair
would have to go before an earlier one. Those regions are all convex, so each
meets a line through the origin in a single interval, and the valid part of the
line is whatever these intervals leave uncovered.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .blocking import Itinerary, Matching, validate_itinerary
from .geometry import as_points, close_pairs, get_eps, smallest_enclosing_disc
from .labeled import AabrArea, OptimizationResult, SedRadius, _convex_line_min
from .vippodrome import Vippodrome, make_vippodrome

EPS_ANGLE = 1e-6
CRITERIA = ("shortest", "aabr", "sed")


@dataclass(frozen=True, eq=False)
class DirectionContext:
    delta: np.ndarray
    order_s: np.ndarray
    order_t: np.ndarray
    S: np.ndarray
    T: np.ndarray

    @property
    def n(self) -> int:
        return len(self.order_s)

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        """Matched pairs in move order; the first one moves first."""
        return tuple((int(a), int(b)) for a, b in zip(self.order_s, self.order_t))

    @property
    def matching(self) -> Matching:
        return Matching(self.pairs)

    def itinerary(self, v) -> Itinerary:
        return Itinerary(self.pairs, tuple(float(c) for c in v))


def _tangent_bisectors(points) -> list[float]:
    pts = as_points(points)
    eps = get_eps()
    out = []
    for i, j in close_pairs(pts, 2.0 + eps):
        d = pts[j] - pts[i]
        if abs(math.hypot(*d) - 2.0) <= eps:
            out.append((math.atan2(d[1], d[0]) + math.pi / 2) % math.pi)
    return out


def _angle_gap(a: float, b: float) -> float:
    g = abs(a - b) % math.pi
    return min(g, math.pi - g)


def is_generic(S, T, delta) -> bool:
    ang = math.atan2(delta[1], delta[0]) % math.pi
    return all(_angle_gap(ang, b) > EPS_ANGLE for b in _tangent_bisectors(S) + _tangent_bisectors(T))


def generic_direction(S, T, seed=None) -> np.ndarray:
    """Random unit vector not parallel to the bisector of any touching pair.

    ``seed`` may be an int or a numpy Generator; with a Generator successive
    calls continue the same stream.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    banned = _tangent_bisectors(S) + _tangent_bisectors(T)
    for _ in range(1000):
        theta = float(rng.uniform(0.0, 2 * math.pi))
        ang = theta % math.pi
        if all(_angle_gap(ang, b) > EPS_ANGLE for b in banned):
            return np.array([math.cos(theta), math.sin(theta)])
    raise RuntimeError("no generic direction found")


def good_direction(S, T) -> np.ndarray:
    """Direction in the middle of the widest gap between inner common tangents.

    Tangents are collected for every pair closer than ``2 * sqrt(2)``, in both
    point sets, and compared modulo a half turn.
    """
    dirs = []
    for pts in (as_points(S), as_points(T)):
        for i, j in close_pairs(pts, 2.0 * math.sqrt(2.0)):
            d = pts[j] - pts[i]
            dist = math.hypot(*d)
            base = math.atan2(d[1], d[0])
            off = math.asin(min(1.0, 2.0 / dist))
            dirs += [(base + off) % math.pi, (base - off) % math.pi]
    if not dirs:
        return np.array([1.0, 0.0])
    dirs = sorted(dirs)
    gaps = [(b - a, a) for a, b in zip(dirs, dirs[1:])] + [(dirs[0] + math.pi - dirs[-1], dirs[-1])]
    width, start = max(gaps)
    ang = (start + width / 2) % math.pi
    return np.array([math.cos(ang), math.sin(ang)])


def _rank(points: np.ndarray, delta: np.ndarray) -> np.ndarray:
    x = points @ delta
    y = points @ np.array([-delta[1], delta[0]])
    # right to left; equal x goes top first
    return np.lexsort((-y, -x))


def delta_matching(S, T, delta) -> DirectionContext:
    S, T = as_points(S), as_points(T)
    if len(S) != len(T):
        raise ValueError("cardinality mismatch")
    delta = np.asarray(delta, dtype=float)
    delta = delta / math.hypot(*delta)
    if not is_generic(S, T, delta):
        raise ValueError("non-generic direction")
    return DirectionContext(delta, _rank(S, delta), _rank(T, delta), S, T)


class BadVippodromeSet:
    """The ``n (n - 1)`` regions where a later pair must precede an earlier one.

    Stored as flat arrays; indexing builds a :class:`Vippodrome` on demand.
    Entry ``k`` of the arrays for kind ``j`` belongs to ranks ``(later[k], earlier[k])``.
    """

    def __init__(self, ctx: DirectionContext):
        As = ctx.S[ctx.order_s]
        At = ctx.T[ctx.order_t]
        later, earlier = np.tril_indices(ctx.n, -1)
        self.ctx = ctx
        self.later = np.concatenate([later, later])
        self.earlier = np.concatenate([earlier, earlier])
        self.kind = np.repeat([1, 2], len(later))
        self.center = As[self.later] - At[self.earlier]
        diff = np.where((self.kind == 1)[:, None], As[self.later] - As[self.earlier],
                        At[self.later] - At[self.earlier])
        dist = np.linalg.norm(diff, axis=1)
        self.axis = diff / np.where(dist > 0, dist, 1.0)[:, None]
        self.half_angle = np.arcsin(np.minimum(1.0, 2.0 / np.maximum(dist, 1e-300)))

    def __len__(self) -> int:
        return len(self.kind)

    def __getitem__(self, k: int) -> Vippodrome:
        ctx = self.ctx
        a, b = int(self.later[k]), int(self.earlier[k])
        pa = (ctx.S[ctx.order_s[a]], ctx.T[ctx.order_t[a]])
        pb = (ctx.S[ctx.order_s[b]], ctx.T[ctx.order_t[b]])
        return make_vippodrome(pa, pb, int(self.kind[k]), (a, b))

    def __iter__(self):
        return (self[k] for k in range(len(self)))

    def line_intervals(self, delta=None) -> tuple[np.ndarray, np.ndarray]:
        """Interior of each region along the line ``t * delta`` as ``(lo, hi)``.

        Regions the line misses, or only grazes, get ``nan`` for both ends.
        """
        d = self.ctx.delta if delta is None else np.asarray(delta, dtype=float)
        C, u, a = self.center, self.axis, self.half_angle
        ca, sa = np.cos(a), np.sin(a)
        ux, uy = u[:, 0], u[:, 1]
        r_hi = np.stack([ux * ca - uy * sa, ux * sa + uy * ca], 1)
        r_lo = np.stack([ux * ca + uy * sa, -ux * sa + uy * ca], 1)
        n_hi = np.stack([-r_hi[:, 1], r_hi[:, 0]], 1)
        n_lo = np.stack([r_lo[:, 1], -r_lo[:, 0]], 1)
        hits = []
        with np.errstate(divide="ignore", invalid="ignore"):
            for n, r in ((n_hi, r_hi), (n_lo, r_lo)):
                t = (np.einsum("ij,ij->i", n, C) + 2.0) / (n @ d)
                q = t[:, None] * d - C
                ok = np.isfinite(t) & (np.einsum("ij,ij->i", r, q) >= -1e-9)
                hits.append(np.where(ok, t, np.nan))
            cd = C @ d
            disc = cd * cd - np.einsum("ij,ij->i", C, C) + 4.0
            root = np.sqrt(np.where(disc >= 0, disc, np.nan))
            for t in (cd - root, cd + root):
                q = t[:, None] * d - C
                ok = (np.einsum("ij,ij->i", r_hi, q) <= 1e-9) & (np.einsum("ij,ij->i", r_lo, q) <= 1e-9)
                hits.append(np.where(ok, t, np.nan))
        H = np.stack(hits, 1)
        none = np.all(np.isnan(H), axis=1)
        Hf = np.where(np.isnan(H), np.inf, H)
        lo = Hf.min(axis=1)
        Hb = np.where(np.isnan(H), -np.inf, H)
        hi = Hb.max(axis=1)
        cos_a = ca
        ahead = u @ d > cos_a + 1e-12
        behind = -(u @ d) > cos_a + 1e-12
        hi = np.where(ahead, np.inf, hi)
        lo = np.where(behind, -np.inf, lo)
        lo = np.where(ahead & none, -np.inf, lo)
        empty = ~(ahead | behind) & (none | (hi - lo <= 1e-12))
        lo = np.where(empty, np.nan, lo)
        hi = np.where(empty, np.nan, hi)
        return lo, hi


def bad_vippodromes(ctx: DirectionContext) -> BadVippodromeSet:
    return BadVippodromeSet(ctx)


@dataclass(frozen=True)
class RayIntervalSet:
    """Valid closed intervals of the ray (or the full line) in direction ``delta``."""

    delta: np.ndarray
    line: bool
    valid: tuple[tuple[float, float], ...]
    blocked: tuple[tuple[float, float], ...]

    def is_valid(self, t: float, tol: float = 1e-12) -> bool:
        return any(lo - tol <= t <= hi + tol for lo, hi in self.valid)


def ray_intervals(ctx: DirectionContext, line: bool = False, bad: BadVippodromeSet | None = None) -> RayIntervalSet:
    bad = bad if bad is not None else BadVippodromeSet(ctx)
    lo, hi = bad.line_intervals()
    keep = ~np.isnan(lo)
    lo, hi = lo[keep], hi[keep]
    start = -math.inf if line else 0.0
    tau = 0.1 * get_eps()
    keep = hi > start + tau
    lo, hi = lo[keep], hi[keep]
    order = np.argsort(lo, kind="stable")
    lo, hi = lo[order], hi[order]
    blocked: list[tuple[float, float]] = []
    if len(lo):
        reach = np.maximum.accumulate(hi)
        # a new group starts where an interval begins at or after everything so far
        new = np.empty(len(lo), dtype=bool)
        new[0] = True
        new[1:] = lo[1:] >= reach[:-1] - tau
        starts = np.flatnonzero(new)
        ends = np.append(starts[1:], len(lo)) - 1
        blocked = [(float(lo[s]), float(reach[e])) for s, e in zip(starts, ends)]
    valid: list[tuple[float, float]] = []
    cur = start
    for blo, bhi in blocked:
        if blo >= cur - tau:
            valid.append((cur, max(cur, blo)))
        cur = max(cur, bhi)
    if cur < math.inf:
        valid.append((cur, math.inf))
    if valid and valid[0][0] == -math.inf and valid[0][1] == -math.inf:
        valid.pop(0)
    return RayIntervalSet(ctx.delta, line, tuple(valid), tuple(blocked))


def _result(ctx: DirectionContext, t: float, value: float, criterion: str, count: int, **details) -> OptimizationResult:
    v = t * ctx.delta
    details.setdefault("t", float(t))
    details.setdefault("direction", tuple(map(float, ctx.delta)))
    return OptimizationResult(tuple(map(float, v)), float(value), ctx.itinerary(v), "optimal",
                              count, criterion, details)


def feasibility_translation(ctx: DirectionContext) -> np.ndarray:
    """A shift along ``delta`` just past every bad region the ray touches."""
    lo, hi = BadVippodromeSet(ctx).line_intervals()
    keep = ~np.isnan(lo)
    lo, hi = lo[keep], hi[keep]
    if np.any(np.isinf(hi) & (hi > 0)):
        raise RuntimeError("a bad region contains the whole ray")
    ends = np.concatenate([lo[np.isfinite(lo)], hi])
    ends = ends[ends >= 0]
    t = (float(ends.max()) if len(ends) else 0.0) + 1.0
    return t * ctx.delta


def shortest_valid_on_ray(ctx: DirectionContext, intervals: RayIntervalSet | None = None) -> OptimizationResult:
    ri = intervals or ray_intervals(ctx)
    t = ri.valid[0][0]
    return _result(ctx, t, t, "shortest", len(ri.blocked) + 1)


def _aabr_on_segment(area: AabrArea, delta: np.ndarray, lo: float, hi: float) -> tuple[float, float]:
    cuts = []
    for axis, breaks in ((0, area.xbreaks), (1, area.ybreaks)):
        if abs(delta[axis]) > 1e-15:
            cuts += [b / delta[axis] for b in breaks]
    cuts = sorted(c for c in cuts if lo < c < hi)
    bounds = [lo] + cuts + [hi]
    f = lambda t: float(area(t * delta))
    best = None
    for a, b in zip(bounds[:-1], bounds[1:]):
        a0, a1 = (a, b) if math.isfinite(b) and b > a else (a, a + 1.0)
        p0, p1 = a0 * delta, a1 * delta
        w0, h0 = float(area.width(p0[0])), float(area.height(p0[1]))
        dw = float(area.width(p1[0])) - w0
        dh = float(area.height(p1[1])) - h0
        cands = [a] + ([b] if math.isfinite(b) else [])
        if dw * dh > 0:
            t = a0 - (w0 * dh + h0 * dw) / (2 * dw * dh) * (a1 - a0)
            if a <= t <= b:
                cands.append(t)
        for t in cands:
            cand = (f(t), t)
            if best is None or cand < best:
                best = cand
    return best


def min_aabr_on_ray(ctx: DirectionContext, intervals: RayIntervalSet | None = None) -> OptimizationResult:
    """Smallest bounding rectangle over the valid part of the ray."""
    ri = intervals or ray_intervals(ctx)
    area = AabrArea(ctx.S, ctx.T)
    best = min(_aabr_on_segment(area, ctx.delta, lo, hi) for lo, hi in ri.valid)
    return _result(ctx, best[1], best[0], "aabr", len(ri.valid))


def _nested_span(rad: SedRadius, delta: np.ndarray) -> tuple[float, float] | None:
    """Stretch of the line where the smaller point set fits in the larger one's disc."""
    if rad.rs >= rad.rt:
        offsets, r = rad.cs - rad.T, rad.rs
    else:
        offsets, r = rad.S - rad.ct, rad.rt
    along = offsets @ delta
    perp2 = np.einsum("ij,ij->i", offsets, offsets) - along ** 2
    slack = r * r - perp2
    if np.any(slack < -1e-9 * max(1.0, r * r)):
        return None
    half = np.sqrt(np.maximum(slack, 0.0))
    lo, hi = float(np.max(along - half)), float(np.min(along + half))
    return (lo, hi) if lo <= hi + 1e-9 else None


def min_sed_on_line(ctx: DirectionContext, intervals: RayIntervalSet | None = None) -> OptimizationResult:
    """Smallest enclosing disc over valid shifts on the whole line through ``delta``.

    If the stretch where one set nests inside the other's disc meets a valid
    interval, the lower bound ``max(r(S), r(T))`` is reached there. Otherwise the
    radius, being convex along the line, is minimized per valid interval at the
    clamp of its unconstrained minimizer.
    """
    ri = intervals or ray_intervals(ctx, line=True)
    rad = SedRadius(ctx.S, ctx.T)
    d = ctx.delta
    f = lambda t: rad(t * d)
    span = _nested_span(rad, d)
    if span is not None:
        hits = []
        for lo, hi in ri.valid:
            a, b = max(lo, span[0]), min(hi, span[1])
            if a <= b:
                hits.append(min(max(0.0, a), b))
        if hits:
            t = min(hits, key=abs)
            return _result(ctx, t, f(t), "sed", len(ri.valid), case="nested")
    anchor = float(rad.concentric @ d)
    bound = lambda t: math.dist(rad.S[0], rad.T[0] + t * d) / 2
    _, t_star = _convex_line_min(f, -math.inf, math.inf, bound, anchor)
    cands = []
    for lo, hi in ri.valid:
        t = min(max(t_star, lo), hi)
        cands.append((f(t), abs(t), t))
    val, _, t = min(cands)
    return _result(ctx, t, val, "sed", len(ri.valid), case="free" if t == t_star else "boundary")


def bound_translation(S, T) -> np.ndarray:
    """Shift along :func:`good_direction` far enough to clear every bad region."""
    S, T = as_points(S), as_points(T)
    rs = smallest_enclosing_disc(S).radius
    rt = smallest_enclosing_disc(T).radius
    delta = good_direction(S, T)
    return delta * (rs + rt + 2.0) * (1 + 8 * len(S))


_OPTIMIZERS = {"shortest": shortest_valid_on_ray, "aabr": min_aabr_on_ray, "sed": min_sed_on_line}


def optimize_direction(S, T, delta, criterion: str = "shortest") -> OptimizationResult:
    ctx = delta_matching(S, T, delta)
    line = criterion == "sed"
    return _OPTIMIZERS[criterion](ctx, ray_intervals(ctx, line=line))


def multi_direction_optimize(S, T, k: int, criterion: str = "shortest", seed=0) -> OptimizationResult:
    """Best of ``k`` random generic directions; the first ``k`` directions of a seed never change."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if criterion not in _OPTIMIZERS:
        raise ValueError(f"unknown criterion {criterion!r}")
    S, T = as_points(S), as_points(T)
    rng = np.random.default_rng(seed)
    best = None
    values = []
    for i in range(k):
        delta = generic_direction(S, T, rng)
        res = optimize_direction(S, T, delta, criterion)
        values.append(res.value)
        if best is None or res.value < best[0].value:
            best = (res, i)
    res, idx = best
    if not validate_itinerary(S, T, Matching(res.itinerary.order), res.v, res.itinerary):
        raise RuntimeError("best direction produced an itinerary that fails replay")
    res.details.update(direction_index=idx, per_direction=values)
    return res
