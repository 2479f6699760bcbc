"""Blocking graph for a fixed shift of the targets, move orders, and replay checks."""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from .geometry import as_points, get_eps, point_segment_distances


@dataclass(frozen=True)
class Matching:
    """Bijection given as ``(source index, target index)`` pairs."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pairs = tuple((int(a), int(b)) for a, b in self.pairs)
        src = sorted(a for a, _ in pairs)
        dst = sorted(b for _, b in pairs)
        if src != list(range(len(pairs))) or dst != list(range(len(pairs))):
            raise ValueError("matching is not a bijection")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def identity(cls, n: int) -> "Matching":
        return cls(tuple((i, i) for i in range(n)))

    @classmethod
    def from_targets(cls, targets) -> "Matching":
        return cls(tuple((i, int(j)) for i, j in enumerate(targets)))

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class Tbg:
    """Vertex ``k`` is ``matching.pairs[k]``; edge ``(a, b)`` means a moves before b."""

    matching: Matching
    edges: frozenset[tuple[int, int]]
    v: tuple[float, float] = (0.0, 0.0)

    @property
    def n(self) -> int:
        return len(self.matching)


@dataclass(frozen=True)
class Itinerary:
    order: tuple[tuple[int, int], ...]
    v: tuple[float, float] = (0.0, 0.0)


class CycleError(ValueError):
    """The blocking graph has a cycle, so no move order works for this shift."""

    def __init__(self, cycle: list[tuple[int, int]]):
        super().__init__("blocking graph has a cycle")
        self.cycle = cycle


def _coerce(S, T, M):
    S, T = as_points(S), as_points(T)
    if len(S) != len(T):
        raise ValueError("cardinality mismatch")
    if M is None:
        M = Matching.identity(len(S))
    elif not isinstance(M, Matching):
        M = Matching(tuple(M))
    if len(M) != len(S):
        raise ValueError("cardinality mismatch")
    return S, T, M


def pair_arrays(S, T, M):
    S, T, M = _coerce(S, T, M)
    idx = np.array(M.pairs, dtype=int).reshape(-1, 2)
    return S[idx[:, 0]], T[idx[:, 1]], M


def blocking_matrix(S, T, M, v) -> np.ndarray:
    """Boolean ``(n, n)`` matrix; entry ``[a, b]`` says pair a must move before pair b."""
    As, At, M = pair_arrays(S, T, M)
    v = np.asarray(v, dtype=float)
    At = At + v
    n = len(As)
    lim = 2.0 - get_eps()
    # [a, b]: start of a against the move of b
    d1 = point_segment_distances(As[:, None, :], As[None, :, :], At[None, :, :])
    # [a, b]: placed target of b against the move of a
    d2 = point_segment_distances(At[None, :, :], As[:, None, :], At[:, None, :])
    adj = (d1 < lim) | (d2 < lim)
    adj[np.arange(n), np.arange(n)] = False
    return adj


def build_tbg(S, T, M, v) -> Tbg:
    _, _, M = _coerce(S, T, M)
    adj = blocking_matrix(S, T, M, v)
    edges = frozenset((int(a), int(b)) for a, b in zip(*np.nonzero(adj)))
    return Tbg(M, edges, tuple(map(float, v)))


def topo_itinerary(g: Tbg) -> Itinerary:
    """Move order respecting every edge; ready pairs go by smallest source index.

    Raises :class:`CycleError` carrying one cycle as a list of pairs, first pair
    repeated at the end.
    """
    n = g.n
    succ: list[list[int]] = [[] for _ in range(n)]
    indeg = [0] * n
    for a, b in g.edges:
        succ[a].append(b)
        indeg[b] += 1
    pairs = g.matching.pairs
    heap = [(pairs[k][0], k) for k in range(n) if indeg[k] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        _, k = heapq.heappop(heap)
        order.append(k)
        for b in succ[k]:
            indeg[b] -= 1
            if indeg[b] == 0:
                heapq.heappush(heap, (pairs[b][0], b))
    if len(order) < n:
        raise CycleError([pairs[k] for k in _find_cycle(n, succ, indeg)])
    return Itinerary(tuple(pairs[k] for k in order), g.v)


def _find_cycle(n, succ, indeg) -> list[int]:
    # every leftover vertex has a leftover predecessor; walk backwards until a repeat
    pred = {}
    left = {k for k in range(n) if indeg[k] > 0}
    for a in left:
        for b in succ[a]:
            if b in left:
                pred.setdefault(b, a)
    k = min(left)
    seen: dict[int, int] = {}
    path = []
    while k not in seen:
        seen[k] = len(path)
        path.append(k)
        k = pred[k]
    cyc = path[seen[k]:][::-1]
    return cyc + [cyc[0]]


def validate_itinerary(S, T, M, v, it: Itinerary) -> bool:
    """Replay the moves one at a time and check each sweeps past every other disc.

    Obstacles for a move are the starts not yet vacated and the targets already
    occupied. Touching is allowed.
    """
    S, T, M = _coerce(S, T, M)
    v = np.asarray(v, dtype=float)
    order = [tuple(p) for p in it.order]
    if sorted(order) != sorted(M.pairs):
        return False
    n = len(order)
    src = np.array([p[0] for p in order], dtype=int)
    dst = np.array([p[1] for p in order], dtype=int)
    starts = S[src]
    targets = T[dst] + v
    lim = 2.0 - get_eps()
    for i in range(n):
        a, b = starts[i], targets[i]
        obstacles = np.concatenate([starts[i + 1:], targets[:i]])
        if len(obstacles) and np.min(point_segment_distances(obstacles, a, b)) < lim:
            return False
    return True
