"""Valid shifts for a fixed matching, and the three optimizers over all of them.

The valid set is closed, so whenever the origin (or an unconstrained optimum)
is not valid, the best valid shift sits on some region boundary. Each boundary
is cut at its crossings with every other boundary, the pieces are labeled
valid or not by a midpoint test, and the objective is minimized over the valid
pieces only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .blocking import (CycleError, Itinerary, Matching, blocking_matrix, build_tbg,
                       pair_arrays, topo_itinerary, validate_itinerary)
from .geometry import aabr, as_points, smallest_enclosing_disc
from .vippodrome import Vippodrome, boundary_pair_hits, distance_on_interval, make_vippodrome

INF = math.inf


@dataclass(frozen=True)
class ValidIntervalSet:
    boundary: int
    intervals: tuple[tuple[float, float], ...]

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def contains(self, s: float, tol: float = 1e-12) -> bool:
        return any(lo - tol <= s <= hi + tol for lo, hi in self.intervals)


@dataclass
class OptimizationResult:
    v: tuple[float, float] | None
    value: float
    itinerary: Itinerary | None
    status: str
    candidates: int = 0
    criterion: str = ""
    details: dict = field(default_factory=dict)

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def all_vippodromes(S, T, M=None) -> list[Vippodrome]:
    """Both kinds for every ordered pair of matched pairs: ``2 n (n - 1)`` regions."""
    As, At, _ = pair_arrays(S, T, M)
    out = []
    n = len(As)
    for a in range(n):
        for b in range(n):
            if a != b:
                for kind in (1, 2):
                    out.append(make_vippodrome((As[a], At[a]), (As[b], At[b]), kind, (a, b)))
    return out


def _acyclic(adj: np.ndarray) -> bool:
    indeg = adj.sum(axis=0)
    alive = np.ones(len(adj), dtype=bool)
    while True:
        ready = alive & (indeg == 0)
        if not ready.any():
            return not alive.any()
        alive &= ~ready
        indeg = indeg - adj[ready].sum(axis=0)


def is_valid_translation(S, T, M, v) -> bool:
    return _acyclic(blocking_matrix(S, T, M, v))


def _split_params(gamma: Vippodrome, others) -> list[float]:
    h = gamma.half_arc
    cuts = {-h, h}
    for other in others:
        if other is gamma:
            continue
        for hit in boundary_pair_hits(gamma, other):
            cuts.add(hit.param1)
    return sorted(cuts)


def build_valid_intervals(gamma_id: int, vips, S, T, M=None) -> ValidIntervalSet:
    """Valid stretches of boundary ``vips[gamma_id]`` as closed parameter intervals."""
    gamma = vips[gamma_id]
    cuts = _split_params(gamma, vips)
    bounds = [-INF] + cuts + [INF]
    pieces = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        if hi - lo <= 1e-12:
            continue
        if lo == -INF:
            mid = hi - 1.0
        elif hi == INF:
            mid = lo + 1.0
        else:
            mid = (lo + hi) / 2
        pieces.append((lo, hi, is_valid_translation(S, T, M, gamma.point_at(mid))))
    merged: list[list[float]] = []
    for lo, hi, ok in pieces:
        if not ok:
            continue
        if merged and abs(merged[-1][1] - lo) <= 1e-12:
            merged[-1][1] = hi
        else:
            merged.append([lo, hi])
    return ValidIntervalSet(gamma_id, tuple((lo, hi) for lo, hi in merged))


def valid_region(S, T, M=None):
    """All boundaries with their valid intervals."""
    vips = all_vippodromes(S, T, M)
    return vips, [build_valid_intervals(k, vips, S, T, M) for k in range(len(vips))]


def _piece_cells(vip: Vippodrome, lo: float, hi: float, extra=()) -> list[tuple[float, float]]:
    h = vip.half_arc
    cuts = sorted({c for c in (-h, h, *extra) if lo < c < hi})
    bounds = [lo] + cuts + [hi]
    return [(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b - a > 1e-13 or a == b]


def _finish(S, T, M, v, value, criterion, candidates, details=None) -> OptimizationResult:
    v = tuple(float(c) for c in v)
    it = topo_itinerary(build_tbg(S, T, M, v))
    if not validate_itinerary(S, T, M, v, it):
        raise RuntimeError("optimizer produced a translation whose itinerary fails replay")
    return OptimizationResult(v, float(value), it, "optimal", candidates, criterion, details or {})


def _infeasible(criterion, candidates) -> OptimizationResult:
    return OptimizationResult(None, INF, None, "infeasible", candidates, criterion)


def _best(cands):
    """Smallest value, ties broken by lexicographic position."""
    return min(cands, key=lambda c: (round(c[0], 12), c[1][0], c[1][1]))


def _over_boundaries(S, T, M, objective, extra_splits=None):
    vips, regions = valid_region(S, T, M)
    cands = []
    count = 0
    for vip, region in zip(vips, regions):
        for lo, hi in region.intervals:
            extra = extra_splits(vip, lo, hi) if extra_splits else ()
            for a, b in _piece_cells(vip, lo, hi, extra):
                count += 1
                val, s = objective(vip, a, b)
                p = vip.point_at(s)
                # a crossing point can sit a rounding error inside a neighbour
                if is_valid_translation(S, T, M, p):
                    cands.append((val, tuple(p)))
    return cands, count


def minimize_translation(S, T, M=None) -> OptimizationResult:
    """Shortest valid shift of the targets."""
    S, T = as_points(S), as_points(T)
    M = M if M is not None else Matching.identity(len(S))
    if is_valid_translation(S, T, M, (0.0, 0.0)):
        return _finish(S, T, M, (0.0, 0.0), 0.0, "shortest", 1)
    origin = np.zeros(2)
    cands, count = _over_boundaries(S, T, M, lambda vip, a, b: distance_on_interval(vip, origin, a, b))
    if not cands:
        return _infeasible("shortest", count)
    val, v = _best(cands)
    return _finish(S, T, M, v, val, "shortest", count)


# bounding rectangle area


class AabrArea:
    """Area of the bounding rectangle of ``D(S)`` and ``D(T + v)`` as a function of ``v``."""

    def __init__(self, S, T):
        self.sx0, self.sx1, self.sy0, self.sy1 = aabr(S)
        self.tx0, self.tx1, self.ty0, self.ty1 = aabr(T)
        self.xbreaks = sorted((self.sx0 - self.tx0, self.sx1 - self.tx1))
        self.ybreaks = sorted((self.sy0 - self.ty0, self.sy1 - self.ty1))

    def width(self, x):
        return np.maximum(self.sx1, x + self.tx1) - np.minimum(self.sx0, x + self.tx0)

    def height(self, y):
        return np.maximum(self.sy1, y + self.ty1) - np.minimum(self.sy0, y + self.ty0)

    def __call__(self, v):
        v = np.asarray(v, dtype=float)
        return self.width(v[..., 0]) * self.height(v[..., 1])

    @property
    def floor(self) -> float:
        """Smallest possible area, reached exactly on the central rectangle."""
        return float(self.width(self.xbreaks[0]) * self.height(self.ybreaks[0]))

    def central_probes(self):
        (x0, x1), (y0, y1) = self.xbreaks, self.ybreaks
        return [((x0 + x1) / 2, (y0 + y1) / 2), (x0, y0), (x1, y0), (x0, y1), (x1, y1)]

    def splits(self, vip: Vippodrome, lo: float, hi: float) -> list[float]:
        """Boundary parameters where the boundary crosses a breakpoint line."""
        out = []
        c, u, r_hi, r_lo, n_hi, n_lo = vip.frame
        h = vip.half_arc
        for axis, breaks in ((0, self.xbreaks), (1, self.ybreaks)):
            for val in breaks:
                for name, n, r in (("ray_hi", n_hi, r_hi), ("ray_lo", n_lo, r_lo)):
                    base = c + 2.0 * n
                    if abs(r[axis]) > 1e-15:
                        k = (val - base[axis]) / r[axis]
                        if k > 0:
                            out.append(-h - k if name == "ray_hi" else h + k)
                off = (val - c[axis]) / 2.0
                if abs(off) <= 1.0:
                    base_ang = math.acos(off) if axis == 0 else math.asin(off)
                    angs = (base_ang, -base_ang) if axis == 0 else (base_ang, math.pi - base_ang)
                    for ang in angs:
                        rel = (ang - vip.base_angle + math.pi) % (2 * math.pi) - math.pi
                        if abs(2.0 * rel) <= h:
                            out.append(2.0 * rel)
        return [s for s in out if lo < s < hi]

    def on_interval(self, vip: Vippodrome, lo: float, hi: float) -> tuple[float, float]:
        """Minimum over a stretch that stays inside one piece and one cell."""
        f = lambda s: float(self(vip.point_at(s)))
        piece = vip.piece_of(_inner(lo, hi))
        if piece != "arc":
            # width and height are affine in s here, so the area is a quadratic
            if math.isfinite(lo) and math.isfinite(hi) and hi > lo:
                a0, a1 = lo, hi
            elif math.isfinite(lo):
                a0, a1 = lo, lo + 1.0
            else:
                a0, a1 = hi - 1.0, hi
            p0, p1 = vip.point_at(a0), vip.point_at(a1)
            w0, h0 = float(self.width(p0[0])), float(self.height(p0[1]))
            dw = float(self.width(p1[0])) - w0
            dh = float(self.height(p1[1])) - h0
            cands = [s for s in (lo, hi) if math.isfinite(s)]
            if dw * dh > 0:
                s = a0 - (w0 * dh + h0 * dw) / (2 * dw * dh) * (a1 - a0)
                if lo <= s <= hi:
                    cands.append(s)
            best = min(cands, key=f)
            return f(best), best
        return _scan_min(f, lo, hi)


def _inner(lo: float, hi: float) -> float:
    if math.isfinite(lo) and math.isfinite(hi):
        return (lo + hi) / 2
    if math.isfinite(lo):
        return lo + 1.0
    return hi - 1.0 if math.isfinite(hi) else 0.0


def _scan_min(f, lo: float, hi: float, samples: int = 33) -> tuple[float, float]:
    """Global-ish minimum of a smooth function on a bounded interval."""
    xs = np.linspace(lo, hi, samples)
    ys = [f(x) for x in xs]
    best = min(zip(ys, xs))
    for i in range(samples):
        left = ys[i - 1] if i > 0 else INF
        right = ys[i + 1] if i + 1 < samples else INF
        if ys[i] <= left and ys[i] <= right:
            a, b = xs[max(i - 1, 0)], xs[min(i + 1, samples - 1)]
            if b > a:
                r = minimize_scalar(f, bounds=(a, b), method="bounded",
                                    options={"xatol": 1e-12 * max(1.0, abs(a), abs(b))})
                best = min(best, (float(r.fun), float(r.x)))
    return best


def minimize_aabr(S, T, M=None) -> OptimizationResult:
    """Valid shift with the smallest bounding rectangle of all discs."""
    S, T = as_points(S), as_points(T)
    M = M if M is not None else Matching.identity(len(S))
    area = AabrArea(S, T)
    probes = [p for p in area.central_probes() if is_valid_translation(S, T, M, p)]
    if probes:
        v = min(probes)
        return _finish(S, T, M, v, area(v), "aabr", 5)
    cands, count = _over_boundaries(S, T, M, area.on_interval, area.splits)
    if not cands:
        return _infeasible("aabr", count + 5)
    val, v = _best(cands)
    return _finish(S, T, M, v, val, "aabr", count + 5)


# smallest enclosing disc


def sed_value(S, T, v) -> float:
    """Radius of the smallest disc holding every center of ``S`` and ``T + v``."""
    return smallest_enclosing_disc(np.vstack([S, np.asarray(T) + np.asarray(v)])).radius


def _convex_line_min(f, lo: float, hi: float, lower_bound, anchor: float | None = None) -> tuple[float, float]:
    """Minimize a convex ``f`` on ``[lo, hi]``; infinite ends are capped first.

    ``lower_bound(s)`` must under-estimate ``f`` and grow without bound.
    """
    if not math.isfinite(lo) or not math.isfinite(hi):
        if anchor is None:
            anchor = lo if math.isfinite(lo) else hi if math.isfinite(hi) else 0.0
        ref = f(anchor)
        step = 1.0
        if not math.isfinite(hi):
            while lower_bound(anchor + step) <= ref:
                step *= 2
            hi = anchor + step
        step = 1.0
        if not math.isfinite(lo):
            while lower_bound(anchor - step) <= ref:
                step *= 2
            lo = anchor - step
    cands = [(f(lo), lo), (f(hi), hi)]
    if hi > lo:
        r = minimize_scalar(f, bounds=(lo, hi), method="bounded",
                            options={"xatol": 1e-12 * max(1.0, abs(lo), abs(hi))})
        cands.append((float(r.fun), float(r.x)))
    return min(cands)


class SedRadius:
    """Enclosing radius of ``S`` and ``T + v``; convex in ``v``."""

    def __init__(self, S, T):
        self.S, self.T = as_points(S), as_points(T)
        ds, dt = smallest_enclosing_disc(self.S), smallest_enclosing_disc(self.T)
        self.cs, self.rs = np.asarray(ds.center), ds.radius
        self.ct, self.rt = np.asarray(dt.center), dt.radius

    def __call__(self, v) -> float:
        return sed_value(self.S, self.T, v)

    @property
    def floor(self) -> float:
        return max(self.rs, self.rt)

    @property
    def concentric(self) -> np.ndarray:
        """A shift that nests the smaller enclosing disc inside the larger one."""
        return self.cs - self.ct

    def lower_bound(self, v) -> float:
        # any two of the points are at most a diameter apart
        return math.dist(self.S[0], self.T[0] + np.asarray(v)) / 2

    def on_interval(self, vip: Vippodrome, lo: float, hi: float) -> tuple[float, float]:
        f = lambda s: self(vip.point_at(s))
        piece = vip.piece_of(_inner(lo, hi))
        if piece != "arc":
            return _convex_line_min(f, lo, hi, lambda s: self.lower_bound(vip.point_at(s)))
        return _scan_min(f, lo, hi)


def minimize_sed(S, T, M=None) -> OptimizationResult:
    """Valid shift with the smallest enclosing disc; the value is the center radius.

    The radius is convex in the shift. When the nesting shift is valid the
    lower bound ``max(r(S), r(T))`` is met and the search stops. Otherwise
    the optimum lies on the valid part of some boundary.
    """
    S, T = as_points(S), as_points(T)
    M = M if M is not None else Matching.identity(len(S))
    rad = SedRadius(S, T)
    v0 = rad.concentric
    if is_valid_translation(S, T, M, v0):
        return _finish(S, T, M, v0, rad(v0), "sed", 1, {"case": "nested"})
    cands, count = _over_boundaries(S, T, M, rad.on_interval)
    if not cands:
        return _infeasible("sed", count + 1)
    val, v = _best(cands)
    return _finish(S, T, M, v, val, "sed", count + 1, {"case": "boundary"})
