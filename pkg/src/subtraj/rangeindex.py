"""Output-sensitive row generation over the concatenated vertices.

The index is a balanced binary tree over vertex *indices*. Every node keeps
the bounding box of the points in its index range. A disk query descends
right child first, drops nodes whose box misses the disk, and reports a
whole node without descending when its box lies inside the disk. Hits
therefore come out in strictly descending index order.

Bounding boxes stand in for a full per-node range tree. On trajectory data
consecutive vertices are spatially close, so boxes are tight and a query
costs about ``O((k + 1) log n)`` for ``k`` hits. Adversarial inputs, where
many boxes touch the disk but hold no hit, degrade towards ``O(n)`` per
query.
"""

import numpy as np
from numba import njit

from .trajectory import EmptyStoreError, Point, TrajectoryStore

__all__ = [
    "RangeIndex",
    "build_index",
    "prev_free_column",
    "enumerate_row_free",
]


class RangeIndex:
    """Heap-ordered tree: node ``k`` has children ``2k`` and ``2k + 1``."""

    def __init__(self, size, lo, hi, box, xy):
        self.size = size
        self.lo = lo
        self.hi = hi
        self.box = box
        self.xy = xy

    @property
    def n(self):
        return self.xy.shape[0]

    @property
    def depth(self):
        return int(self.size).bit_length() - 1

    def node_ranges(self, level):
        """1-based index ranges of the non-empty nodes at ``level`` (root = 0)."""
        out = []
        for k in range(1 << level, 1 << (level + 1)):
            if self.lo[k] <= self.hi[k]:
                out.append((int(self.lo[k]) + 1, int(self.hi[k]) + 1))
        return out

    def query(self, q, delta, j, limit):
        """Up to ``limit`` 1-based columns ``<= j`` within ``delta`` of ``q``, descending."""
        if self.n == 0 or j < 1:
            return np.empty(0, dtype=np.int64)
        out = np.empty(min(limit, self.n), dtype=np.int64)
        d2 = float(delta) * float(delta) if delta >= 0 else -1.0
        k = _collect(self.lo, self.hi, self.box, self.xy, float(q[0]), float(q[1]), d2,
                     min(j, self.n) - 1, out.size, out)
        return out[:k] + 1


def build_index(store: TrajectoryStore) -> RangeIndex:
    """Build the index over all vertices of ``store``.

    Raises
    ------
    EmptyStoreError
        If the store has no vertices.
    """
    if store.n == 0:
        raise EmptyStoreError("cannot index an empty store")
    size = 1
    while size < store.n:
        size *= 2
    lo, hi, box = _build(store.xy, size)
    return RangeIndex(size, lo, hi, box, store.xy)


def _point_xy(q):
    if isinstance(q, Point):
        return (q.x, q.y)
    return (float(q[0]), float(q[1]))


def prev_free_column(index: RangeIndex, store: TrajectoryStore, q, delta: float, j: int):
    """Greatest column ``j' <= j`` with ``d(store(j'), q) <= delta``, or ``None``."""
    hit = index.query(_point_xy(q), delta, j, 1)
    return int(hit[0]) if hit.size else None


def enumerate_row_free(index: RangeIndex, store: TrajectoryStore, q, delta: float):
    """All 1-based columns within ``delta`` of ``q`` in strictly descending order."""
    return iter(index.query(_point_xy(q), delta, index.n, index.n).tolist())


@njit(cache=True)
def _build(xy, size):
    n = xy.shape[0]
    lo = np.empty(2 * size, dtype=np.int64)
    hi = np.empty(2 * size, dtype=np.int64)
    box = np.empty((2 * size, 4))
    for i in range(size):
        k = size + i
        lo[k] = i
        if i < n:
            hi[k] = i
            box[k, 0] = xy[i, 0]
            box[k, 1] = xy[i, 1]
            box[k, 2] = xy[i, 0]
            box[k, 3] = xy[i, 1]
        else:
            hi[k] = i - 1  # empty padding leaf
            box[k, 0] = np.inf
            box[k, 1] = np.inf
            box[k, 2] = -np.inf
            box[k, 3] = -np.inf
    for k in range(size - 1, 0, -1):
        left, right = 2 * k, 2 * k + 1
        lo[k] = lo[left]
        hi[k] = hi[right] if hi[right] >= lo[right] else hi[left]
        box[k, 0] = min(box[left, 0], box[right, 0])
        box[k, 1] = min(box[left, 1], box[right, 1])
        box[k, 2] = max(box[left, 2], box[right, 2])
        box[k, 3] = max(box[left, 3], box[right, 3])
    return lo, hi, box


@njit(cache=True)
def _collect(lo, hi, box, xy, qx, qy, d2, jmax, limit, out):
    """Write up to ``limit`` 0-based hits ``<= jmax`` into ``out``, descending."""
    count = 0
    if d2 < 0.0 or limit <= 0:
        return 0
    stack = np.empty(128, dtype=np.int64)
    top = 0
    stack[top] = 1
    top += 1
    while top > 0:
        top -= 1
        k = stack[top]
        if hi[k] < lo[k] or lo[k] > jmax:
            continue
        # nearest and farthest point of the box from q
        nx = min(max(qx, box[k, 0]), box[k, 2]) - qx
        ny = min(max(qy, box[k, 1]), box[k, 3]) - qy
        if nx * nx + ny * ny > d2:
            continue
        fx = max(qx - box[k, 0], box[k, 2] - qx)
        fy = max(qy - box[k, 1], box[k, 3] - qy)
        if fx * fx + fy * fy <= d2 or lo[k] == hi[k]:
            j = min(hi[k], jmax)
            while j >= lo[k]:
                if lo[k] == hi[k]:
                    dx = xy[j, 0] - qx
                    dy = xy[j, 1] - qy
                    if dx * dx + dy * dy > d2:
                        break
                out[count] = j
                count += 1
                if count >= limit:
                    return count
                j -= 1
            continue
        # left pushed first so the right child is popped first
        stack[top] = 2 * k
        top += 1
        stack[top] = 2 * k + 1
        top += 1
    return count
