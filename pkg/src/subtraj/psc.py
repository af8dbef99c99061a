"""Streaming a 2-approximate Pareto front of (cardinality, centre length).

Every node of a balanced binary tree over each boundary-free piece is
swept twice. The forward pass anchors ``col_a`` labels at the node's first
row and reports a maximum-cardinality cluster for every prefix. The
backward pass does the same on the reversed store, which yields every
suffix. Any centre has a prefix or suffix of some node covering at least
half of its vertices, and shrinking a centre never loses members.

Clusters are handed to a consumer as they are found and never collected.
The same centre may be reported more than once (a leaf is both a prefix
and a suffix of itself).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numba import njit

from .freespace import ColState, _clear, _col_row, _dense_cols, _prefix_query, col_step_second
from .rangeindex import RangeIndex, _collect, build_index
from .sc import Cluster, _cluster
from .trajectory import SubtrajectoryRef, TrajectoryStore

__all__ = [
    "NodeInterval",
    "ParetoStream",
    "decompose",
    "query_prefix",
    "query_suffix",
    "psc_stream",
    "psc_select",
]


@dataclass(frozen=True)
class NodeInterval:
    lo: int
    hi: int
    depth: int


@dataclass
class ParetoStream:
    """Running statistics of one stream; clusters themselves go to ``consumer``."""

    delta: float
    consumer: Callable = None
    emitted: int = 0
    max_ell: int = -1
    max_m: int = 0
    sweep_bytes: int = 0
    index_bytes: int = 0
    nodes: int = 0

    def emit(self, cluster: Cluster):
        self.emitted += 1
        self.max_ell = max(self.max_ell, cluster.centre.ell)
        self.max_m = max(self.max_m, cluster.cardinality)
        if self.consumer is not None:
            self.consumer(cluster)


def decompose(store: TrajectoryStore) -> list[NodeInterval]:
    """Nodes of one balanced tree per piece, breadth first, leaves included."""
    nodes = []
    for lo, hi in store.segments():
        level = [(lo, hi)]
        depth = 0
        while level:
            nxt = []
            for a, b in level:
                nodes.append(NodeInterval(a, b, depth))
                if a < b:
                    mid = (a + b) // 2
                    nxt += [(a, mid), (mid + 1, b)]
            level = nxt
            depth += 1
    return nodes


def query_prefix(state: ColState, a: int, c: int) -> Cluster:
    """Maximum-cardinality cluster for centre ``[a, c]`` from labels anchored at ``a``."""
    if (state.a, state.c) != (a, c):
        raise ValueError(f"state is at rows [{state.a}, {state.c}], not [{a}, {c}]")
    return _cluster(a, c, state.query(), state.delta)


def query_suffix(state: ColState, c: int, b: int) -> Cluster:
    """Maximum-cardinality cluster for centre ``[c, b]``.

    ``state`` must be a sweep over the reversed store, anchored at the
    mirror of ``b`` and currently at the mirror of ``c``.
    """
    n = state.store.n
    if (state.a, state.c) != (n + 1 - b, n + 1 - c):
        raise ValueError(f"reversed state does not span [{c}, {b}]")
    pairs = [(n + 1 - j2, n + 1 - j1) for j1, j2 in state.query()]
    return _cluster(c, b, pairs, state.delta)


def psc_stream(delta: float, store: TrajectoryStore, consumer: Callable = None,
               index: RangeIndex = None, dense: bool = False) -> ParetoStream:
    """Report one maximum-cardinality cluster per prefix and suffix of every tree node."""
    if delta < 0:
        raise ValueError("delta must be non-negative")
    stream = ParetoStream(float(delta), consumer)
    if store.n == 0:
        return stream
    rev = store.reversed()
    if not dense:
        index = index or build_index(store)
        rev_index = build_index(rev)
        stream.index_bytes = sum(x.nbytes for ix in (index, rev_index) for x in (ix.lo, ix.hi, ix.box))
    else:
        rev_index = None
    n = store.n
    for node in decompose(store):
        stream.nodes += 1
        state = ColState(store, delta, node.lo, index=index, dense=dense)
        for c in range(node.lo, node.hi + 1):
            col_step_second(state, store, c)
            stream.emit(query_prefix(state, node.lo, c))
        state = ColState(rev, delta, n + 1 - node.hi, index=rev_index, dense=dense)
        for c in range(node.hi, node.lo - 1, -1):
            col_step_second(state, rev, n + 1 - c)
            stream.emit(query_suffix(state, c, node.hi))
        stream.sweep_bytes = max(stream.sweep_bytes, state.cur.nbytes + state.prev.nbytes)
    return stream


# -- fused selection used by the greedy adapter ------------------------------

KEY_COVERAGE = 0
KEY_EVALUATION = 1


def psc_select(delta: float, store: TrajectoryStore, key: int, weights=(1.0, 0.0, 0.0),
               total_vertices: int = None, dense: bool = False):
    """Best cluster of the stream under ``key``, earliest emission on ties.

    ``KEY_COVERAGE`` maximises covered vertices. ``KEY_EVALUATION`` maximises
    the coverage-to-cost ratio with every member distance bounded by
    ``delta``, which is exact for the cost side of a ``delta``-cluster up
    to that bound. Only the winning cluster is materialised.

    Returns
    -------
    (Cluster or None, int)
        The winner and the number of clusters streamed.
    """
    if store.n == 0:
        return None, 0
    n = store.n
    rev = store.reversed()
    nodes = decompose(store)
    los = np.array([nd.lo for nd in nodes], dtype=np.int64) - 1
    his = np.array([nd.hi for nd in nodes], dtype=np.int64) - 1
    c1, c2, c3 = (float(w) for w in weights)
    X = float(total_vertices or n)
    ix = build_index(store)
    rix = build_index(rev)
    best = np.array([-1.0, -1.0, -1.0, -1.0])
    emitted = _psc_best(store.xy, store.seg_start, ix.lo, ix.hi, ix.box,
                        rev.xy, rev.seg_start, rix.lo, rix.hi, rix.box,
                        los, his, float(delta) ** 2, dense, key, c1, c2, c3, float(delta), X, best)
    if best[0] < 0:
        return None, emitted
    a, c, forward = int(best[1]), int(best[2]), best[3] > 0.5
    if forward:
        state = ColState(store, delta, a + 1, index=ix, dense=dense)
        for r in range(a + 1, c + 2):
            col_step_second(state, store, r)
        return query_prefix(state, a + 1, c + 1), emitted
    # a, c are mirrored rows on the reversed store
    state = ColState(rev, delta, a + 1, index=rix, dense=dense)
    for r in range(a + 1, c + 2):
        col_step_second(state, rev, r)
    return query_suffix(state, n - c, n - a), emitted


@njit(cache=True)
def _sweep_node(xy, seg_start, lo_t, hi_t, box, dense, d2, start, stop, key,
                c1, c2, c3, delta, X, best, forward, cur, prev, buf, out1, out2):
    n = xy.shape[0]
    prev_k = 0
    cur_k = 0
    prev_cols = np.empty(0, dtype=np.int64)
    cur_cols = np.empty(0, dtype=np.int64)
    emitted = 0
    for r in range(start, stop + 1):
        if dense:
            cols = _dense_cols(xy, r, d2)
        else:
            k = _collect(lo_t, hi_t, box, xy, xy[r, 0], xy[r, 1], d2, n - 1, n, buf)
            cols = np.empty(k, dtype=np.int64)
            for t in range(k):
                cols[t] = buf[k - 1 - t]
        _clear(prev, prev_cols)
        prev, cur = cur, prev
        prev_cols = cur_cols
        _col_row(prev, cur, cols, r == start, seg_start)
        cur_cols = cols
        m = _prefix_query(cur, cols, out1, out2)
        cov = 0
        for t in range(m):
            cov += out2[t] - out1[t] + 1
        if key == 0:
            val = float(cov)
        else:
            val = (c3 * cov / X) / (c1 + c2 * delta * m)
        emitted += 1
        if val > best[0]:
            best[0] = val
            best[1] = start
            best[2] = r
            best[3] = 1.0 if forward else 0.0
    _clear(prev, prev_cols)
    _clear(cur, cur_cols)
    return emitted


@njit(cache=True)
def _psc_best(xy, seg_start, lo_t, hi_t, box, rxy, rseg, rlo_t, rhi_t, rbox,
              los, his, d2, dense, key, c1, c2, c3, delta, X, best):
    n = xy.shape[0]
    cur = np.full(n, -1, dtype=np.int64)
    prev = np.full(n, -1, dtype=np.int64)
    buf = np.empty(n, dtype=np.int64)
    out1 = np.empty(n, dtype=np.int64)
    out2 = np.empty(n, dtype=np.int64)
    emitted = 0
    for t in range(los.shape[0]):
        emitted += _sweep_node(xy, seg_start, lo_t, hi_t, box, dense, d2, los[t], his[t], key,
                               c1, c2, c3, delta, X, best, True, cur, prev, buf, out1, out2)
        emitted += _sweep_node(rxy, rseg, rlo_t, rhi_t, rbox, dense, d2, n - 1 - his[t],
                               n - 1 - los[t], key, c1, c2, c3, delta, X, best, False,
                               cur, prev, buf, out1, out2)
    return emitted
