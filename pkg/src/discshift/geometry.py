"""Planar primitives shared by the solvers.

Points are plain ``(x, y)`` numpy arrays. All comparisons that decide whether
two unit discs overlap go through a single tolerance, readable with
:func:`get_eps` and changeable with :func:`set_eps`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

_EPS = 1e-9


def get_eps() -> float:
    return _EPS


def set_eps(value: float) -> None:
    global _EPS
    if not value >= 0:
        raise ValueError("eps must be non-negative")
    _EPS = float(value)


def as_points(points) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.size == 0:
        return arr.reshape(0, 2)
    arr = arr.reshape(-1, 2)
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite coordinates")
    return arr


def rotate(vec, angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([c * vec[0] - s * vec[1], s * vec[0] + c * vec[1]])


def cross(a, b) -> float:
    return a[0] * b[1] - a[1] * b[0]


@dataclass(frozen=True)
class Disc:
    center: tuple[float, float]
    radius: float

    def contains(self, p, tol: float = 1e-9) -> bool:
        return math.dist(self.center, p) <= self.radius + tol


@dataclass(frozen=True)
class Segment:
    a: tuple[float, float]
    b: tuple[float, float]


@dataclass(frozen=True)
class Wedge:
    """Cone at ``apex`` swept counterclockwise from ``dir_lo`` to ``dir_hi``."""

    apex: tuple[float, float]
    dir_lo: tuple[float, float]
    dir_hi: tuple[float, float]

    @property
    def opening(self) -> float:
        lo = math.atan2(self.dir_lo[1], self.dir_lo[0])
        hi = math.atan2(self.dir_hi[1], self.dir_hi[0])
        ang = (hi - lo) % (2 * math.pi)
        return math.pi if abs(ang) < 1e-15 else ang

    @property
    def bisector(self) -> np.ndarray:
        d = np.add(self.dir_lo, self.dir_hi)
        n = math.hypot(*d)
        if n < 1e-12:
            # halfplane: bisector is dir_lo turned a quarter counterclockwise
            return rotate(self.dir_lo, math.pi / 2)
        return d / n

    def contains(self, p, tol: float = 1e-9) -> bool:
        w = np.subtract(p, self.apex)
        r = math.hypot(*w)
        if r <= tol:
            return True
        u = self.bisector
        half = self.opening / 2
        ang = math.atan2(cross(u, w), float(np.dot(u, w)))
        return abs(ang) <= half + tol / r


@dataclass(frozen=True)
class Configuration:
    """Ordered centers of unit discs with optional unique labels."""

    points: np.ndarray
    labels: tuple | None = None

    def __post_init__(self):
        pts = as_points(self.points)
        object.__setattr__(self, "points", pts)
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != len(pts):
                raise ValueError("labels must align with points")
            if len(set(labels)) != len(labels):
                raise ValueError("labels must be unique")
            object.__setattr__(self, "labels", labels)
        if not is_valid_configuration(pts):
            raise ValueError("invalid configuration")

    def __len__(self) -> int:
        return len(self.points)


def is_valid_configuration(points) -> bool:
    pts = as_points(points)
    if len(pts) < 2:
        return True
    return len(close_pairs(pts, 2.0 - get_eps(), strict=True)) == 0


def point_segment_distance(c, a, b) -> float:
    c = np.asarray(c, dtype=float)
    a = np.asarray(a, dtype=float)
    d = np.asarray(b, dtype=float) - a
    dd = float(d @ d)
    if dd == 0.0:
        return math.dist(c, a)
    t = min(1.0, max(0.0, float((c - a) @ d) / dd))
    return math.dist(c, a + t * d)


def point_segment_distances(c: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise distance from ``c[i]`` to segment ``a[i] b[i]``; inputs broadcast."""
    c, a, b = np.broadcast_arrays(np.asarray(c, float), np.asarray(a, float), np.asarray(b, float))
    d = b - a
    dd = np.einsum("...i,...i->...", d, d)
    num = np.einsum("...i,...i->...", c - a, d)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(dd > 0, num / np.where(dd > 0, dd, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    foot = a + t[..., None] * d
    return np.linalg.norm(c - foot, axis=-1)


def disc_blocks_segment(c, seg: Segment | Sequence) -> bool:
    """Whether the open unit disc at ``c`` meets the open region swept along ``seg``.

    Tangency (distance 2 up to eps) does not block.
    """
    a, b = (seg.a, seg.b) if isinstance(seg, Segment) else seg
    return point_segment_distance(c, a, b) < 2.0 - get_eps()


def inner_tangent_wedge(a, b) -> Wedge:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = math.dist(a, b)
    if d < 2.0 - get_eps():
        raise ValueError("overlapping discs")
    u = (a - b) / d
    half = math.asin(min(1.0, 2.0 / d))
    lo = rotate(u, -half)
    hi = rotate(u, half)
    return Wedge(tuple(a), tuple(lo), tuple(hi))


def close_pairs(points, threshold: float, strict: bool = False) -> list[tuple[int, int]]:
    """Index pairs ``(i, j)``, ``i < j``, at distance <= threshold (< when strict)."""
    pts = as_points(points)
    if len(pts) < 2:
        return []
    tree = cKDTree(pts)
    pairs = tree.query_pairs(threshold, output_type="ndarray")
    if len(pairs) == 0:
        return []
    dist = np.linalg.norm(pts[pairs[:, 0]] - pts[pairs[:, 1]], axis=1)
    keep = dist < threshold if strict else dist <= threshold
    out = sorted((int(i), int(j)) for i, j in pairs[keep])
    return out


# smallest enclosing disc


def _circle2(a, b):
    cx, cy = (a[0] + b[0]) / 2, (a[1] + b[1]) / 2
    return cx, cy, math.hypot(a[0] - cx, a[1] - cy)


def _circle3(a, b, c):
    bx, by = b[0] - a[0], b[1] - a[1]
    cx, cy = c[0] - a[0], c[1] - a[1]
    d = 2 * (bx * cy - by * cx)
    if abs(d) < 1e-300:
        return None
    b2, c2 = bx * bx + by * by, cx * cx + cy * cy
    ux = (cy * b2 - by * c2) / d
    uy = (bx * c2 - cx * b2) / d
    return ux + a[0], uy + a[1], math.hypot(ux, uy)


def _inside(circ, p, tol):
    return math.hypot(p[0] - circ[0], p[1] - circ[1]) <= circ[2] + tol


def _through3(a, b, c):
    circ = _circle3(a, b, c)
    if circ is not None:
        return circ
    # collinear: the widest pair spans the other point
    return max((_circle2(a, b), _circle2(a, c), _circle2(b, c)), key=lambda t: t[2])


def smallest_enclosing_disc(points) -> Disc:
    """Minimal closed disc containing all points (randomized incremental)."""
    pts = [tuple(map(float, p)) for p in as_points(points)]
    if not pts:
        raise ValueError("empty point set")
    # fixed shuffle: reproducible yet expected linear time
    order = np.random.default_rng(len(pts)).permutation(len(pts))
    pts = [pts[i] for i in order]
    scale = max(1.0, max(abs(c) for p in pts for c in p))
    tol = 1e-12 * scale
    circ = (pts[0][0], pts[0][1], 0.0)
    for i in range(1, len(pts)):
        if _inside(circ, pts[i], tol):
            continue
        circ = (pts[i][0], pts[i][1], 0.0)
        for j in range(i):
            if _inside(circ, pts[j], tol):
                continue
            circ = _circle2(pts[i], pts[j])
            for k in range(j):
                if not _inside(circ, pts[k], tol):
                    circ = _through3(pts[i], pts[j], pts[k])
    return Disc((circ[0], circ[1]), circ[2])


def sed_radius(points) -> float:
    return smallest_enclosing_disc(points).radius


# farthest-point Voronoi diagram


@dataclass(frozen=True)
class FvdEdge:
    sites: tuple[int, int]
    a: tuple[float, float]
    b: tuple[float, float]
    a_at_infinity: bool
    b_at_infinity: bool


@dataclass(frozen=True)
class FvdCell:
    site: int
    polygon: np.ndarray = field(repr=False)
    unbounded: bool = False


def _clip(poly: list, normal, offset: float) -> list:
    """Keep the part of a convex polygon where ``normal . x <= offset``."""
    out = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        fp = normal[0] * p[0] + normal[1] * p[1] - offset
        fq = normal[0] * q[0] + normal[1] * q[1] - offset
        if fp <= 0:
            out.append(p)
        if (fp < 0 < fq) or (fq < 0 < fp):
            t = fp / (fp - fq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return out


def farthest_voronoi(points, half_width: float | None = None):
    """Farthest-site Voronoi diagram, clipped to a square box.

    Returns ``(edges, cells)`` where ``cells`` maps a site index to its cell.
    Only hull sites own a nonempty cell. Edge endpoints lying on the box are
    flagged as being at infinity.
    """
    pts = as_points(points)
    if len(pts) < 2:
        raise ValueError("need at least two sites")
    if np.all(np.abs(pts - pts[0]) <= 1e-12):
        raise ValueError("degenerate sites")
    centre = pts.mean(axis=0)
    if half_width is None:
        half_width = 10.0 * (sed_radius(pts) + 10.0)
    h = float(half_width)
    box = [(centre[0] - h, centre[1] - h), (centre[0] + h, centre[1] - h),
           (centre[0] + h, centre[1] + h), (centre[0] - h, centre[1] + h)]
    tol = 1e-9 * max(1.0, h)

    def on_box(p):
        return abs(abs(p[0] - centre[0]) - h) <= tol or abs(abs(p[1] - centre[1]) - h) <= tol

    cells: dict[int, FvdCell] = {}
    edges: dict[tuple[int, int], FvdEdge] = {}
    for i, s in enumerate(pts):
        poly = list(box)
        for j, q in enumerate(pts):
            diff = s - q
            if j == i or diff @ diff <= 1e-24:
                continue
            mid = (s + q) / 2
            poly = _clip(poly, diff, float(diff @ mid))
            if len(poly) < 3:
                break
        if len(poly) < 3:
            continue
        arr = np.array(poly)
        if abs(_area(arr)) <= 1e-12 * h * h:
            continue
        cells[i] = FvdCell(i, arr, any(on_box(p) for p in poly))
        for k in range(len(poly)):
            p, q = poly[k], poly[(k + 1) % len(poly)]
            if math.dist(p, q) <= tol:
                continue
            m = ((p[0] + q[0]) / 2, (p[1] + q[1]) / 2)
            # which bisector does this side lie on: the other equidistant farthest site
            d = np.linalg.norm(pts - np.asarray(m), axis=1)
            ties = [j for j in np.flatnonzero(d >= d[i] - 1e-9 * max(1.0, d[i])) if j != i
                    and np.any(np.abs(pts[j] - s) > 1e-12)]
            if not ties:
                continue
            j = int(ties[0])
            key = (min(i, j), max(i, j))
            if key not in edges:
                edges[key] = FvdEdge(key, tuple(map(float, p)), tuple(map(float, q)),
                                     on_box(p), on_box(q))
    return list(edges.values()), cells


def _area(poly: np.ndarray) -> float:
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def farthest_site(points, p) -> int:
    pts = as_points(points)
    return int(np.argmax(np.linalg.norm(pts - np.asarray(p), axis=1)))


def aabr(points, pad: float = 1.0) -> tuple[float, float, float, float]:
    """Bounding rectangle ``(xmin, xmax, ymin, ymax)`` of discs of radius ``pad``."""
    pts = as_points(points)
    return (float(pts[:, 0].min() - pad), float(pts[:, 0].max() + pad),
            float(pts[:, 1].min() - pad), float(pts[:, 1].max() + pad))
