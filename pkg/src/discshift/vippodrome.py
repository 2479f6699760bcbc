"""Translation-space regions where one pair is forced to move before another.

For matched pairs ``A = (A_s, A_t)`` and ``B = (B_s, B_t)`` there are two such
regions. Kind 1 collects the shifts ``v`` for which the unmoved start disc of
``A`` gets in the way of ``B`` moving to ``B_t + v``; kind 2 those for which
``B``'s placed target gets in the way of ``A``'s move. Both are a cone rounded
by a radius-2 disc around ``A_s - B_t``.

The boundary is parametrized by signed arc length ``s``. ``s = 0`` is the arc
midpoint; the arc covers ``|s| <= half_arc``; ``s < -half_arc`` runs out along
``ray_hi`` and ``s > half_arc`` along ``ray_lo``. Increasing ``s`` walks the
boundary counterclockwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .geometry import Wedge, get_eps, point_segment_distance, rotate

RADIUS = 2.0


@dataclass(frozen=True)
class BoundaryPoint:
    piece: str
    param: float
    point: tuple[float, float]
    t: float | None = None
    overlap: bool = False
    vid: int | None = None


@dataclass(frozen=True)
class PairHit:
    point: tuple[float, float]
    param1: float
    param2: float
    overlap: bool = False


@dataclass(frozen=True, eq=False)
class Vippodrome:
    kind: int
    pair_ids: tuple[int, int]
    a_start: tuple[float, float]
    a_target: tuple[float, float]
    b_start: tuple[float, float]
    b_target: tuple[float, float]
    arc_center: tuple[float, float]
    axis: tuple[float, float]
    half_angle: float

    @property
    def arc_radius(self) -> float:
        return RADIUS

    @cached_property
    def wedge(self) -> Wedge:
        u = np.asarray(self.axis)
        return Wedge(self.arc_center, tuple(rotate(u, -self.half_angle)),
                     tuple(rotate(u, self.half_angle)))

    @cached_property
    def frame(self):
        u = np.asarray(self.axis)
        a = self.half_angle
        r_hi, r_lo = rotate(u, a), rotate(u, -a)
        n_hi, n_lo = rotate(u, a + math.pi / 2), rotate(u, -a - math.pi / 2)
        return np.asarray(self.arc_center), u, r_hi, r_lo, n_hi, n_lo

    @property
    def half_arc(self) -> float:
        return RADIUS * (math.pi / 2 - self.half_angle)

    @property
    def base_angle(self) -> float:
        """Polar angle of the arc midpoint as seen from the arc center."""
        return math.atan2(-self.axis[1], -self.axis[0])

    def point_at(self, s: float) -> np.ndarray:
        c, u, r_hi, r_lo, n_hi, n_lo = self.frame
        h = self.half_arc
        if s > h:
            return c + RADIUS * n_lo + (s - h) * r_lo
        if s < -h:
            return c + RADIUS * n_hi + (-h - s) * r_hi
        ang = self.base_angle + s / RADIUS
        return c + RADIUS * np.array([math.cos(ang), math.sin(ang)])

    def piece_of(self, s: float) -> str:
        h = self.half_arc
        return "ray_lo" if s > h else "ray_hi" if s < -h else "arc"

    def param_of(self, p, piece: str | None = None) -> float:
        """Boundary parameter of a point known to lie on the boundary."""
        c, u, r_hi, r_lo, n_hi, n_lo = self.frame
        q = np.asarray(p, dtype=float) - c
        h = self.half_arc
        if piece is None:
            if q @ r_lo > 0 and q @ r_lo >= q @ r_hi:
                piece = "ray_lo"
            elif q @ r_hi > 0:
                piece = "ray_hi"
            else:
                piece = "arc"
        if piece == "ray_lo":
            return h + float(q @ r_lo)
        if piece == "ray_hi":
            return -h - float(q @ r_hi)
        ang = math.atan2(q[1], q[0]) - self.base_angle
        ang = (ang + math.pi) % (2 * math.pi) - math.pi
        return max(-h, min(h, RADIUS * ang))

    def predicate_distance(self, v) -> float:
        v = np.asarray(v, dtype=float)
        if self.kind == 1:
            return point_segment_distance(self.a_start, self.b_start, np.add(self.b_target, v))
        return point_segment_distance(np.add(self.b_target, v), self.a_start, np.add(self.a_target, v))

    def wedge_distance(self, v) -> float:
        """Distance from ``v`` to the unrounded cone; the region is where this is <= 2."""
        c, u, r_hi, r_lo, n_hi, n_lo = self.frame
        q = np.asarray(v, dtype=float) - c
        along = float(q @ u)
        across = abs(float(q @ rotate(u, math.pi / 2)))
        a = self.half_angle
        if math.atan2(across, along) <= a:
            return 0.0
        # beyond the edge ray's normal the nearest point is the apex
        if along * math.cos(a) + across * math.sin(a) <= 0:
            return math.hypot(*q)
        return along * -math.sin(a) + across * math.cos(a)


def make_vippodrome(a_pair, b_pair, kind: int, pair_ids: tuple[int, int] = (0, 1)) -> Vippodrome:
    """Region of shifts where pair ``a`` must move before pair ``b``.

    Each pair is ``(start, target)``.
    """
    a_s, a_t = (np.asarray(p, dtype=float) for p in a_pair)
    b_s, b_t = (np.asarray(p, dtype=float) for p in b_pair)
    if kind == 1:
        diff = a_s - b_s
    elif kind == 2:
        diff = a_t - b_t
    else:
        raise ValueError("kind must be 1 or 2")
    d = math.hypot(*diff)
    if d < 2.0 - get_eps():
        raise ValueError("overlapping discs")
    axis = diff / d
    half = math.asin(min(1.0, RADIUS / d))
    centre = a_s - b_t
    return Vippodrome(kind, tuple(pair_ids), tuple(a_s), tuple(a_t), tuple(b_s), tuple(b_t),
                      tuple(centre), tuple(axis), half)


def vip_contains(vip: Vippodrome, v) -> bool:
    """Closed membership: the constraint holds or is tangent."""
    return vip.predicate_distance(v) <= RADIUS + get_eps()


def vip_interior(vip: Vippodrome, v) -> bool:
    """Open membership, which is what creates a blocking edge."""
    return vip.predicate_distance(v) < RADIUS - get_eps()


# line and ray queries


def _line_circle(p0, d, c, r):
    w = p0 - c
    a = float(d @ d)
    b = float(w @ d)
    cc = float(w @ w) - r * r
    disc = b * b - a * cc
    if disc < -1e-12 * max(1.0, b * b):
        return []
    if disc <= 1e-18 * max(1.0, b * b):
        return [-b / a]
    sq = math.sqrt(disc)
    return [(-b - sq) / a, (-b + sq) / a]


def _on_arc(vip: Vippodrome, p, tol=1e-9) -> bool:
    c, u, r_hi, r_lo, n_hi, n_lo = vip.frame
    q = p - c
    return q @ r_hi <= tol and q @ r_lo <= tol


def boundary_line_hits(vip: Vippodrome, origin=(0.0, 0.0), direction=(1.0, 0.0),
                       ray: bool = False) -> list[BoundaryPoint]:
    """Crossings of the boundary with the line ``origin + t * direction``.

    With ``ray`` only ``t >= 0`` is kept. Results are sorted by ``t``.
    """
    c, u, r_hi, r_lo, n_hi, n_lo = vip.frame
    p0 = np.asarray(origin, dtype=float)
    d = np.asarray(direction, dtype=float)
    eps = get_eps()
    found: list[tuple[float, str]] = []
    for piece, n, r in (("ray_hi", n_hi, r_hi), ("ray_lo", n_lo, r_lo)):
        base = c + RADIUS * n
        den = float(n @ d)
        off = float(n @ (p0 - base))
        if abs(den) <= 1e-12 * math.hypot(*d):
            if abs(off) <= eps:
                raise ValueError("collinear overlap")
            continue
        t = -off / den
        if float(r @ (p0 + t * d - base)) >= -1e-12:
            found.append((t, piece))
    for t in _line_circle(p0, d, c, RADIUS):
        if _on_arc(vip, p0 + t * d):
            found.append((t, "arc"))
    found.sort()
    out: list[BoundaryPoint] = []
    scale = math.hypot(*d)
    for t, piece in found:
        if ray and t < -1e-12:
            continue
        if out and abs(t - out[-1].t) * scale <= 1e-9:
            continue
        p = p0 + t * d
        out.append(BoundaryPoint(piece, vip.param_of(p, piece), tuple(p), t))
    return out


# boundary against boundary


def _pieces(vip: Vippodrome):
    c, u, r_hi, r_lo, n_hi, n_lo = vip.frame
    return (("ray_hi", c + RADIUS * n_hi, r_hi), ("arc", None, None), ("ray_lo", c + RADIUS * n_lo, r_lo))


def _arc_interval(vip: Vippodrome) -> tuple[float, float]:
    h = vip.half_arc / RADIUS
    return vip.base_angle - h, vip.base_angle + h


def boundary_pair_hits(v1: Vippodrome, v2: Vippodrome) -> list[PairHit]:
    """Points common to both boundaries.

    Transversal crossings come back as plain hits. When the two arcs lie on the
    same circle their shared stretch is reported by its endpoints, tagged as
    overlap.
    """
    c1, c2 = np.asarray(v1.arc_center), np.asarray(v2.arc_center)
    same_circle = math.dist(c1, c2) <= 1e-9
    pts: list[tuple[np.ndarray, bool]] = []
    for name1, o1, d1 in _pieces(v1):
        for name2, o2, d2 in _pieces(v2):
            if name1 != "arc" and name2 != "arc":
                pts.extend(_ray_ray(o1, d1, o2, d2))
            elif name1 == "arc" and name2 == "arc":
                if same_circle:
                    pts.extend((p, True) for p in _arc_overlap(v1, v2))
                else:
                    pts.extend((p, False) for p in _arc_arc(v1, v2))
            elif not same_circle:
                vip, o, d = (v1, o2, d2) if name1 == "arc" else (v2, o1, d1)
                for t in _line_circle(o, d, np.asarray(vip.arc_center), RADIUS):
                    p = o + t * d
                    if t >= -1e-12 and _on_arc(vip, p):
                        pts.append((p, False))
    out: list[PairHit] = []
    for p, ov in pts:
        dup = next((k for k, h in enumerate(out) if math.dist(h.point, p) <= 1e-9), None)
        if dup is not None:
            if ov and not out[dup].overlap:
                out[dup] = PairHit(out[dup].point, out[dup].param1, out[dup].param2, True)
            continue
        out.append(PairHit(tuple(p), v1.param_of(p), v2.param_of(p), ov))
    return out


def _ray_ray(o1, d1, o2, d2):
    den = float(d1[0] * d2[1] - d1[1] * d2[0])
    w = o2 - o1
    if abs(den) <= 1e-12:
        # parallel; overlap only when collinear
        if abs(float(w[0] * d1[1] - w[1] * d1[0])) > 1e-9:
            return []
        if float(d1 @ d2) > 0:
            far = o2 if float(w @ d1) > 0 else o1
            return [(far, True)]
        # opposite directions: shared segment between the two origins, if any
        if float(w @ d1) >= 0:
            return [(o1, True), (o2, True)]
        return []
    t1 = float(w[0] * d2[1] - w[1] * d2[0]) / den
    t2 = float(w[0] * d1[1] - w[1] * d1[0]) / den
    if t1 >= -1e-12 and t2 >= -1e-12:
        return [(o1 + t1 * d1, False)]
    return []


def _arc_arc(v1: Vippodrome, v2: Vippodrome):
    c1, c2 = np.asarray(v1.arc_center), np.asarray(v2.arc_center)
    w = c2 - c1
    dist = math.hypot(*w)
    if dist > 2 * RADIUS + 1e-12 or dist == 0.0:
        return []
    mid = c1 + w / 2
    h = math.sqrt(max(0.0, RADIUS * RADIUS - dist * dist / 4))
    perp = np.array([-w[1], w[0]]) / dist
    cands = [mid] if h <= 1e-12 else [mid + h * perp, mid - h * perp]
    return [p for p in cands if _on_arc(v1, p) and _on_arc(v2, p)]


def _arc_overlap(v1: Vippodrome, v2: Vippodrome):
    lo1, hi1 = _arc_interval(v1)
    lo2, hi2 = _arc_interval(v2)
    # shift the second interval next to the first before intersecting
    shift = round(((lo1 + hi1) - (lo2 + hi2)) / (4 * math.pi)) * 2 * math.pi
    lo2, hi2 = lo2 + shift, hi2 + shift
    lo, hi = max(lo1, lo2), min(hi1, hi2)
    if lo > hi + 1e-12:
        return []
    c = np.asarray(v1.arc_center)
    ends = [lo] if hi - lo <= 1e-12 else [lo, hi]
    return [c + RADIUS * np.array([math.cos(a), math.sin(a)]) for a in ends]


# extrema of objectives along the boundary


def boundary_extrema(vip: Vippodrome, target) -> list[BoundaryPoint]:
    """Local minima of the distance from the boundary to the point ``target``.

    Each piece is solved in closed form. When ``target`` is the arc center every
    arc point is equally close and the arc midpoint stands in for all of them.
    """
    c, u, r_hi, r_lo, n_hi, n_lo = vip.frame
    p = np.asarray(target, dtype=float)
    out: list[BoundaryPoint] = []
    h = vip.half_arc
    for piece, n, r in (("ray_hi", n_hi, r_hi), ("ray_lo", n_lo, r_lo)):
        foot = float(r @ (p - c - RADIUS * n))
        if foot > 1e-12:
            s = -h - foot if piece == "ray_hi" else h + foot
            out.append(BoundaryPoint(piece, s, tuple(vip.point_at(s))))
    q = p - c
    if math.hypot(*q) <= 1e-12:
        out.append(BoundaryPoint("arc", 0.0, tuple(vip.point_at(0.0))))
    else:
        ang = math.atan2(q[1], q[0]) - vip.base_angle
        ang = (ang + math.pi) % (2 * math.pi) - math.pi
        if abs(RADIUS * ang) <= h:
            s = RADIUS * ang
            out.append(BoundaryPoint("arc", s, tuple(vip.point_at(s))))
    return sorted(out, key=lambda b: b.param)


def distance_on_interval(vip: Vippodrome, target, lo: float, hi: float) -> tuple[float, float]:
    """Minimum distance to ``target`` over boundary parameters ``[lo, hi]``.

    Returns ``(distance, param)``. Candidates are the interval ends and any
    local minimum inside it; the distance along one piece is unimodal.
    """
    cands = [s for s in (lo, hi) if math.isfinite(s)]
    cands += [b.param for b in boundary_extrema(vip, target) if lo <= b.param <= hi]
    if not cands:
        raise ValueError("unbounded interval without a local minimum")
    p = np.asarray(target, dtype=float)
    best = min(cands, key=lambda s: (math.dist(vip.point_at(s), p), s))
    return math.dist(vip.point_at(best), p), best
