"""Benchmark instance generators, alignment and JSON persistence."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .blocking import Matching
from .geometry import as_points, is_valid_configuration, smallest_enclosing_disc

KINDS = ("circle", "packing", "cross", "random")
MAX_RETRIES = 100_000


@dataclass(frozen=True, eq=False)
class Instance:
    start: np.ndarray
    target: np.ndarray
    labeled: bool = False
    matching: Matching | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        s, t = as_points(self.start), as_points(self.target)
        if len(s) != len(t):
            raise ValueError("cardinality mismatch")
        if not (is_valid_configuration(s) and is_valid_configuration(t)):
            raise ValueError("invalid configuration")
        if self.labeled and self.matching is None:
            object.__setattr__(self, "matching", Matching.identity(len(s)))
        object.__setattr__(self, "start", s)
        object.__setattr__(self, "target", t)

    @property
    def n(self) -> int:
        return len(self.start)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Instance):
            return NotImplemented
        return (np.array_equal(self.start, other.start) and np.array_equal(self.target, other.target)
                and self.labeled == other.labeled and self.matching == other.matching
                and self.metadata == other.metadata)


def _circle(n: int):
    radius = 1.0 / math.sin(math.pi / n) if n > 1 else 0.0
    ang = 2 * math.pi * np.arange(n) / n
    start = radius * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    ang = ang + math.pi / n
    target = radius * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    return start, target


def packing_shape(n: int) -> tuple[int, int]:
    """Rows and columns of the most square-like grid whose size is closest to ``n``."""
    best = None
    for rows in range(1, n + 1):
        for cols in (rows, rows + 1):
            key = (abs(rows * cols - n), rows * cols, rows)
            if best is None or key < best[0]:
                best = (key, rows, cols)
        if rows * rows > 2 * n:
            break
    return best[1], best[2]


def _packing(n: int):
    rows, cols = packing_shape(n)
    j, i = np.meshgrid(np.arange(cols), np.arange(rows))
    start = np.stack([2.0 * j.ravel(), 2.0 * i.ravel()], axis=1)
    # hexagonal rows: odd rows shifted by one, row pitch sqrt(3) keeps neighbours touching
    x = 2.0 * j + (i % 2)
    y = math.sqrt(3.0) * i
    target = np.stack([x.ravel(), y.ravel()], axis=1).astype(float)
    return start, target


def _cross(n: int):
    k = 2.0 * np.arange(n)
    start = np.stack([np.zeros(n), k], axis=1)
    target = np.stack([k, np.zeros(n)], axis=1)
    return start, target


def random_configuration(rng: np.random.Generator, n: int, side: float, min_dist: float = 2.0) -> np.ndarray:
    """Uniform points in a ``side`` square, redrawing any that land too close."""
    pts = np.empty((n, 2))
    count = 0
    retries = 0
    while count < n:
        p = rng.uniform(0.0, side, 2)
        if count and np.min(np.hypot(*(pts[:count] - p).T)) < min_dist:
            retries += 1
            if retries > MAX_RETRIES:
                raise RuntimeError("density too high")
            continue
        pts[count] = p
        count += 1
    return pts


def generate(kind: str, n: int, seed: int = 0, labeled: bool = False, separation: float = 0.0) -> Instance:
    """Build one instance; ``packing`` rounds ``n`` to a near-square grid size.

    ``separation`` only affects ``random``: points then keep ``2 + separation`` apart.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if kind == "circle":
        start, target = _circle(n)
    elif kind == "packing":
        start, target = _packing(n)
    elif kind == "cross":
        start, target = _cross(n)
    elif kind == "random":
        rng = np.random.default_rng(seed)
        side = 2.6 * math.sqrt(n) * (1.0 + separation / 2.0)
        start = random_configuration(rng, n, side, 2.0 + separation)
        target = random_configuration(rng, n, side, 2.0 + separation)
    else:
        raise ValueError(f"unknown generator {kind!r}")
    meta = {"generator": kind, "n": len(start), "seed": int(seed)}
    if separation:
        meta["separation"] = float(separation)
    return Instance(start, target, labeled, Matching.identity(len(start)) if labeled else None, meta)


def align(inst: Instance, mode: str = "sed") -> Instance:
    """Shift the target so both enclosing-disc centers (or centroids) coincide."""
    if mode == "sed":
        shift = (np.asarray(smallest_enclosing_disc(inst.start).center)
                 - np.asarray(smallest_enclosing_disc(inst.target).center))
    elif mode == "mass":
        shift = inst.start.mean(axis=0) - inst.target.mean(axis=0)
    else:
        raise ValueError(f"unknown alignment {mode!r}")
    return replace(inst, target=inst.target + shift)


def to_dict(inst: Instance) -> dict:
    out = {
        "version": 1,
        "labeled": bool(inst.labeled),
        "start": inst.start.tolist(),
        "target": inst.target.tolist(),
        "metadata": dict(inst.metadata),
    }
    if inst.labeled and inst.matching is not None:
        targets = dict(inst.matching.pairs)
        out["matching"] = [targets[i] for i in range(inst.n)]
    return out


def _points(data, key):
    if key not in data:
        raise ValueError(f"{key}: missing")
    val = data[key]
    if not isinstance(val, list):
        raise ValueError(f"{key}: expected a list of [x, y]")
    for i, p in enumerate(val):
        if not (isinstance(p, list) and len(p) == 2 and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in p)):
            raise ValueError(f"{key}[{i}]: expected [x, y] numbers")
    return np.array(val, dtype=float).reshape(-1, 2)


def from_dict(data: dict) -> Instance:
    if not isinstance(data, dict):
        raise ValueError("<root>: expected an object")
    if data.get("version") != 1:
        raise ValueError("version: expected 1")
    labeled = data.get("labeled", False)
    if not isinstance(labeled, bool):
        raise ValueError("labeled: expected a boolean")
    start, target = _points(data, "start"), _points(data, "target")
    if len(start) != len(target):
        raise ValueError("cardinality mismatch")
    matching = None
    if "matching" in data:
        m = data["matching"]
        if not (isinstance(m, list) and all(isinstance(k, int) for k in m)) or len(m) != len(start):
            raise ValueError("matching: expected one target index per start point")
        try:
            matching = Matching.from_targets(m)
        except ValueError:
            raise ValueError("matching: not a bijection") from None
    meta = data.get("metadata", {})
    if not isinstance(meta, dict):
        raise ValueError("metadata: expected an object")
    if not (is_valid_configuration(start) and is_valid_configuration(target)):
        raise ValueError("invalid configuration")
    return Instance(start, target, labeled, matching if labeled else None, meta)


def save(path, inst: Instance) -> None:
    Path(path).write_text(json.dumps(to_dict(inst), indent=1) + "\n")


def load(path) -> Instance:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"<root>: not valid JSON ({exc.msg})") from None
    return from_dict(data)
