"""Slow, obviously-correct reference implementations for tests.

Nothing here is used by the production path. Size caps are enforced so
an oracle cannot end up inside a real run by accident.
"""

import itertools
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .frechet import frechet_leq

__all__ = [
    "OracleSizeError",
    "ExplicitMatrix",
    "brute_frechet_walks",
    "brute_reach",
    "brute_max_cardinality",
    "brute_pareto_front",
    "max_disjoint_intervals",
]

REACH_CAP = 64
CARDINALITY_CAP = 30
PARETO_CAP = 25


class OracleSizeError(ValueError):
    pass


def _plain(store):
    """Points as tuples and 1-based boundary set, read straight off the store."""
    pts = [(float(x), float(y)) for x, y in store.xy]
    return pts, set(store.boundaries)


def _crosses(boundaries, lo, hi):
    # does [lo, hi] (1-based) contain a boundary edge?
    return any(lo <= e < hi for e in boundaries)


def brute_frechet_walks(P, Q):
    """Discrete Fréchet distance by enumerating every monotone walk (tiny inputs only)."""
    P = [tuple(p) for p in P]
    Q = [tuple(q) for q in Q]
    if not P or not Q:
        raise ValueError("empty curve")
    if len(P) + len(Q) > 14:
        raise OracleSizeError("walk enumeration is exponential; keep curves tiny")
    best = math.inf

    def walk(i, j, cost):
        nonlocal best
        cost = max(cost, math.dist(P[i], Q[j]))
        if cost >= best:
            return
        if i == 0 and j == 0:
            best = cost
            return
        for s, l in ((i - 1, j - 1), (i - 1, j), (i, j - 1)):
            if s >= 0 and l >= 0:
                walk(s, l, cost)

    walk(len(P) - 1, len(Q) - 1, 0.0)
    return best


class ExplicitMatrix:
    """The full free-space digraph as Python sets; 1-based cells."""

    def __init__(self, store, delta):
        pts, bnd = _plain(store)
        n = len(pts)
        if n > REACH_CAP:
            raise OracleSizeError(f"n={n} exceeds cap {REACH_CAP}")
        self.n = n
        self.delta = delta
        self.boundaries = bnd
        self._closure = None
        self.free = [[False] * (n + 1) for _ in range(n + 1)]
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                dx = pts[i - 1][0] - pts[j - 1][0]
                dy = pts[i - 1][1] - pts[j - 1][1]
                # squared form, matching how a threshold distance is defined everywhere
                self.free[i][j] = dx * dx + dy * dy <= delta * delta

    def successors(self, i, j):
        if not self.free[i][j]:
            return []
        out = []
        for s, k in ((i, j - 1), (i - 1, j), (i - 1, j - 1)):
            if s < 1 or k < 1 or not self.free[s][k]:
                continue
            if s != i and (s in self.boundaries):
                continue
            if k != j and (k in self.boundaries):
                continue
            out.append((s, k))
        return out

    def reachable(self, cell):
        """All cells reachable from ``cell`` by breadth-first search."""
        seen = {cell}
        todo = deque([cell])
        while todo:
            for nxt in self.successors(*todo.popleft()):
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append(nxt)
        return seen

    def closure(self):
        """Reachable sets of every cell as int bitsets; bit ``(i-1)*n + (j-1)``.

        Every edge goes to an earlier cell in row-major order, so one pass in
        that order suffices.
        """
        if self._closure is None:
            n = self.n
            sets = {}
            for i in range(1, n + 1):
                for j in range(1, n + 1):
                    bits = 1 << ((i - 1) * n + (j - 1))
                    for s, k in self.successors(i, j):
                        bits |= sets[(s, k)]
                    sets[(i, j)] = bits
            self._closure = sets
        return self._closure

    def has_path(self, src, dst):
        """Path between two free cells; blocked cells are not vertices of the graph."""
        i, j = dst
        if not (self.free[src[0]][src[1]] and self.free[i][j]):
            return False
        return bool(self.closure()[src] >> ((i - 1) * self.n + (j - 1)) & 1)


def brute_reach(matrix, cell):
    """Minimum reachable row and, per row, the maximum column reached from ``cell``.

    An isolated (non-free) cell reaches only itself.
    """
    if matrix.n > REACH_CAP:
        raise OracleSizeError(f"n={matrix.n} exceeds cap {REACH_CAP}")
    n = matrix.n
    bits = matrix.closure()[cell]
    landing = {}
    row_mask = (1 << n) - 1
    for i in range(1, n + 1):
        row = (bits >> ((i - 1) * n)) & row_mask
        if row:
            landing[i] = row.bit_length()
    return min(landing), landing


def max_disjoint_intervals(intervals):
    """Maximum set of pairwise-disjoint closed intervals, earliest right end first."""
    chosen = []
    last = -math.inf
    for lo, hi in sorted(intervals, key=lambda iv: (iv[1], -iv[0])):
        if lo > last:
            chosen.append((lo, hi))
            last = hi
    return chosen


def _close_intervals(pts, bnd, a, b, delta):
    pts = np.asarray(pts, dtype=np.float64).reshape(-1, 2)
    centre = pts[a - 1 : b]
    n = len(pts)
    out = []
    for c in range(1, n + 1):
        for d in range(c, n + 1):
            if _crosses(bnd, c, d):
                break
            if frechet_leq(centre, pts[c - 1 : d], delta):
                out.append((c, d))
    return out


def brute_max_cardinality(centre, delta, store):
    """Exact maximum number of disjoint ``delta``-close subtrajectories for ``centre``.

    Returns
    -------
    (int, list of (c, d))
        The cardinality and one witness set of 1-based intervals.
    """
    pts, bnd = _plain(store)
    if len(pts) > CARDINALITY_CAP:
        raise OracleSizeError(f"n={len(pts)} exceeds cap {CARDINALITY_CAP}")
    a, b = centre.a, centre.b
    if _crosses(bnd, a, b):
        raise ValueError("centre crosses a boundary edge")
    members = max_disjoint_intervals(_close_intervals(pts, bnd, a, b, delta))
    return len(members), members


@dataclass
class ParetoOracle:
    """Every boundary-free centre with its best cardinality, and the Pareto maxima.

    ``front`` holds ``(vertex_count, cardinality)`` pairs not dominated by any
    other centre.
    """

    clusters: list = field(default_factory=list)
    front: list = field(default_factory=list)
    witnesses: dict = field(default_factory=dict)


def brute_pareto_front(delta, store):
    pts, bnd = _plain(store)
    n = len(pts)
    if n > PARETO_CAP:
        raise OracleSizeError(f"n={n} exceeds cap {PARETO_CAP}")
    result = ParetoOracle()
    for a, b in itertools.combinations_with_replacement(range(1, n + 1), 2):
        if _crosses(bnd, a, b):
            continue
        members = max_disjoint_intervals(_close_intervals(pts, bnd, a, b, delta))
        result.clusters.append(((a, b), len(members), members))
    best = {}
    for (a, b), m, members in result.clusters:
        key = b - a + 1
        if m > best.get(key, (0,))[0]:
            best[key] = (m, (a, b), members)
    for length, (m, centre, members) in best.items():
        if not any(l2 >= length and m2 >= m and (l2, m2) != (length, m)
                   for l2, (m2, _, _) in best.items()):
            result.front.append((length, m))
            result.witnesses[(length, m)] = (centre, members)
    result.front.sort()
    return result
