"""Sweep states over the free-space matrix of a store against itself.

Cell ``(i, j)`` is free when ``d(T(i), T(j)) <= delta``. Free cells form a
digraph with edges to ``(i, j - 1)``, ``(i - 1, j)`` and ``(i - 1, j - 1)``.
Edges whose row or column step crosses a boundary edge of the store are
omitted, so every path spells out two boundary-free subtrajectories.

Two sweep states are maintained one row at a time:

* :class:`RowWindow` keeps rows ``a..b`` sparsely, each free cell labelled
  with the smallest row it can reach.
* :class:`ColState` keeps two dense rows of ``col_a`` labels: the largest
  column at which a path from the cell can land in the anchor row ``a``.

Kernels work on 0-based indices; the classes expose 1-based ones.
"""

import numpy as np
from numba import njit

from .rangeindex import RangeIndex, _collect, build_index
from .trajectory import TrajectoryStore

__all__ = [
    "NEG_INF",
    "is_free",
    "RowWindow",
    "ColState",
    "window_step_first",
    "window_step_second",
    "col_step_second",
    "free_columns",
]

NEG_INF = float("-inf")
"""Label of a cell with no path to the anchor row."""

# kernel-side encoding of NEG_INF in 0-based column arrays
UNREACHABLE = -1


def is_free(store: TrajectoryStore, i: int, j: int, delta: float) -> bool:
    p = store.xy[i - 1]
    q = store.xy[j - 1]
    dx = p[0] - q[0]
    dy = p[1] - q[1]
    return bool(dx * dx + dy * dy <= delta * delta)


class RowSource:
    """Produces the free columns of a row, via the index or a dense scan."""

    def __init__(self, store, delta, index=None, dense=False):
        self.xy = store.xy
        self.d2 = float(delta) * float(delta)
        self.dense = dense
        if not dense and index is None and store.n:
            index = build_index(store)
        self.index = index
        self._buf = np.empty(max(store.n, 1), dtype=np.int64)

    def cols(self, row):
        """Ascending 0-based free columns of 0-based ``row``."""
        if self.dense:
            return _dense_cols(self.xy, row, self.d2)
        ix = self.index
        k = _collect(ix.lo, ix.hi, ix.box, self.xy, self.xy[row, 0], self.xy[row, 1],
                     self.d2, self.xy.shape[0] - 1, self._buf.size, self._buf)
        return self._buf[:k][::-1].copy()


def free_columns(store, i, delta, index=None, dense=False):
    """1-based ascending free columns of row ``i``."""
    return RowSource(store, delta, index, dense).cols(i - 1) + 1


class RowWindow:
    """Rows ``a..b`` of the free-space graph with their reach labels.

    Cells live in one flat buffer; dropping the top row only moves a
    pointer and the buffer is compacted when it fills up. Labels of kept
    rows are never recomputed after the top row goes, so a label may name a
    row above ``a``. Consumers only ever ask whether a label is ``<= a``,
    which stale labels still answer correctly: a path to a row above ``a``
    passes through row ``a``.
    """

    def __init__(self, store: TrajectoryStore, delta: float, index: RangeIndex = None,
                 dense: bool = False):
        self.store = store
        self.delta = float(delta)
        self.source = RowSource(store, delta, index, dense)
        n = store.n
        self.row_lo = np.zeros(n + 1, dtype=np.int64)
        self.row_hi = np.zeros(n + 1, dtype=np.int64)
        self.col = np.empty(max(64, 2 * n), dtype=np.int64)
        self.reach = np.empty_like(self.col)
        self.end = 0
        # 0-based bounds; empty while top > bottom
        self.top = 0
        self.bottom = -1
        self.peak_rows = 0
        self.peak_cells = 0

    @property
    def a(self) -> int:
        return self.top + 1

    @property
    def b(self) -> int:
        return self.bottom + 1

    @property
    def n_rows(self) -> int:
        return max(0, self.bottom - self.top + 1)

    @property
    def n_cells(self) -> int:
        if self.n_rows == 0:
            return 0
        return int(self.row_hi[self.bottom] - self.row_lo[self.top])

    def reset(self, row: int):
        """Empty the window so that the next appended row is ``row`` (1-based)."""
        self.top = row - 1
        self.bottom = row - 2
        self.end = 0

    def row(self, i: int) -> list[tuple[int, int]]:
        """``(column, reach)`` pairs of window row ``i``, 1-based."""
        r = i - 1
        if not (self.top <= r <= self.bottom):
            raise IndexError(f"row {i} not in window [{self.a}, {self.b}]")
        s, e = self.row_lo[r], self.row_hi[r]
        return [(int(c) + 1, int(x) + 1) for c, x in zip(self.col[s:e], self.reach[s:e])]

    def _make_room(self, k):
        if self.end + k <= self.col.size:
            return
        s = self.row_lo[self.top] if self.n_rows else self.end
        live = self.end - s
        if live + k > self.col.size // 2:
            cap = max(2 * (live + k), self.col.size)
            col, reach = np.empty(cap, np.int64), np.empty(cap, np.int64)
        else:
            col, reach = self.col, self.reach
        col[:live] = self.col[s:self.end]
        reach[:live] = self.reach[s:self.end]
        if self.n_rows:
            self.row_lo[self.top:self.bottom + 1] -= s
            self.row_hi[self.top:self.bottom + 1] -= s
        self.col, self.reach, self.end = col, reach, live

    def append(self, cols):
        r = self.bottom + 1
        self._make_room(cols.size)
        prev = r - 1 if self.n_rows else -1
        self.end = _append_row(self.col, self.reach, self.row_lo, self.row_hi, self.end,
                               prev, r, cols, self.store.seg_start)
        self.bottom = r
        self.peak_rows = max(self.peak_rows, self.n_rows)
        self.peak_cells = max(self.peak_cells, self.n_cells)

    def query(self, target: int = 0):
        """Greedy members for centre ``[a, b]`` as 1-based ``(j1, j2)`` pairs, right to left."""
        n = self.store.n
        out1 = np.empty(n, dtype=np.int64)
        out2 = np.empty(n, dtype=np.int64)
        k = _window_query(self.col, self.reach, self.row_lo, self.row_hi, self.top,
                          self.bottom, self.store.seg_start, target, out1, out2)
        return [(int(x) + 1, int(y) + 1) for x, y in zip(out1[:k], out2[:k])]


def window_step_second(window: RowWindow, store: TrajectoryStore, index_of_new_row: int) -> RowWindow:
    """Append row ``index_of_new_row``, which must follow the current bottom row."""
    if window.n_rows and index_of_new_row != window.b + 1:
        raise ValueError(f"row {index_of_new_row} does not follow bottom row {window.b}")
    if not window.n_rows:
        window.reset(index_of_new_row)
    window.append(window.source.cols(index_of_new_row - 1))
    return window


def window_step_first(window: RowWindow) -> RowWindow:
    """Drop the top row in O(1)."""
    if window.n_rows == 0:
        raise ValueError("window is empty")
    window.top += 1
    if window.n_rows == 0:
        window.end = 0
    return window


class ColState:
    """Dense ``col_a`` labels of the current row ``c`` and of row ``c - 1``."""

    def __init__(self, store: TrajectoryStore, delta: float, a: int, index: RangeIndex = None,
                 dense: bool = False):
        self.store = store
        self.delta = float(delta)
        self.source = RowSource(store, delta, index, dense)
        self.a = a
        self.c = a - 1
        self.cur = np.full(store.n, UNREACHABLE, dtype=np.int64)
        self.prev = np.full(store.n, UNREACHABLE, dtype=np.int64)
        self.cur_cols = np.empty(0, dtype=np.int64)
        self.prev_cols = np.empty(0, dtype=np.int64)

    def labels(self, which: str = "cur") -> list:
        """1-based labels of a whole row, ``NEG_INF`` where unreachable."""
        arr = self.cur if which == "cur" else self.prev
        return [NEG_INF if v == UNREACHABLE else int(v) + 1 for v in arr]

    def query(self):
        """Greedy maximum-cardinality members for centre ``[a, c]``, 1-based."""
        out1 = np.empty(self.store.n, dtype=np.int64)
        out2 = np.empty(self.store.n, dtype=np.int64)
        k = _prefix_query(self.cur, self.cur_cols, out1, out2)
        return [(int(x) + 1, int(y) + 1) for x, y in zip(out1[:k], out2[:k])]


def col_step_second(state: ColState, store: TrajectoryStore, c: int) -> ColState:
    """Advance to row ``c``: either the anchor row itself or the row after the current one."""
    if c == state.a and state.c == state.a - 1:
        first = True
    elif c == state.c + 1:
        first = False
    else:
        raise ValueError(f"row {c} does not follow row {state.c}")
    if not store.is_boundary_free(state.a, c):
        raise ValueError(f"rows [{state.a}, {c}] cross a boundary edge")
    cols = state.source.cols(c - 1)
    # recycle the row two steps back as the new current row
    _clear(state.prev, state.prev_cols)
    state.prev, state.cur = state.cur, state.prev
    state.prev_cols = state.cur_cols
    _col_row(state.prev, state.cur, cols, first, store.seg_start)
    state.cur_cols = cols
    state.c = c
    return state


@njit(cache=True)
def _dense_cols(xy, row, d2):
    n = xy.shape[0]
    out = np.empty(n, dtype=np.int64)
    k = 0
    qx, qy = xy[row, 0], xy[row, 1]
    for j in range(n):
        dx = xy[j, 0] - qx
        dy = xy[j, 1] - qy
        if dx * dx + dy * dy <= d2:
            out[k] = j
            k += 1
    return out[:k]


@njit(cache=True)
def _clear(arr, cols):
    for y in cols:
        arr[y] = -1


@njit(cache=True)
def _col_row(prev, cur, cols, first, seg_start):
    last = -2
    for y in cols:
        if first:
            v = y
        else:
            v = prev[y]
            if y - 1 >= seg_start[y] and prev[y - 1] > v:
                v = prev[y - 1]
            if last == y - 1 and y - 1 >= seg_start[y] and cur[y - 1] > v:
                v = cur[y - 1]
        cur[y] = v
        last = y


@njit(cache=True)
def _prefix_query(cur, cols, out1, out2):
    k = 0
    bound = cur.shape[0] - 1
    for t in range(cols.shape[0] - 1, -1, -1):
        y = cols[t]
        if y > bound:
            continue
        j1 = cur[y]
        if j1 != -1:
            out1[k] = j1
            out2[k] = y
            k += 1
            bound = j1 - 1
    return k


@njit(cache=True)
def _append_row(col, reach, row_lo, row_hi, end, prev, r, cols, seg_start):
    # reach(r, j) = min over free successors (r, j-1), (r-1, j), (r-1, j-1), else r
    ps = row_lo[prev] if prev >= 0 else 0
    pe = row_hi[prev] if prev >= 0 else 0
    row_ok = prev >= 0 and r - 1 >= seg_start[r]
    p = ps
    row_lo[r] = end
    last = -2
    for y in cols:
        v = r
        left_ok = y - 1 >= seg_start[y]
        if row_ok:
            while p < pe and col[p] < y - 1:
                p += 1
            q = p
            while q < pe and col[q] <= y:
                if col[q] == y or left_ok:
                    if reach[q] < v:
                        v = reach[q]
                q += 1
        if left_ok and last == y - 1 and reach[end - 1] < v:
            v = reach[end - 1]
        col[end] = y
        reach[end] = v
        end += 1
        last = y
    row_hi[r] = end
    return end


@njit(cache=True)
def _find(col, s, e, y):
    # binary search for column y in col[s:e]; -1 if absent
    lo, hi = s, e
    while lo < hi:
        mid = (lo + hi) // 2
        if col[mid] < y:
            lo = mid + 1
        else:
            hi = mid
    if lo < e and col[lo] == y:
        return lo
    return -1


@njit(cache=True)
def _window_query(col, reach, row_lo, row_hi, a, b, seg_start, target, out1, out2):
    """Right-to-left greedy over row ``b``; ``target <= 0`` means no early stop."""
    k = 0
    s, e = row_lo[b], row_hi[b]
    bound = seg_start.shape[0] - 1
    t = e - 1
    while t >= s:
        j2 = col[t]
        if j2 > bound or reach[t] > a:
            t -= 1
            continue
        # walk to the right-most landing in row a, preferring up, then diagonal, then left
        i, j = b, j2
        while i > a:
            up_ok = i - 1 >= seg_start[i]
            left_ok = j - 1 >= seg_start[j]
            q = _find(col, row_lo[i - 1], row_hi[i - 1], j) if up_ok else -1
            if q >= 0 and reach[q] <= a:
                i -= 1
                continue
            if up_ok and left_ok:
                q = _find(col, row_lo[i - 1], row_hi[i - 1], j - 1)
                if q >= 0 and reach[q] <= a:
                    i -= 1
                    j -= 1
                    continue
            if left_ok:
                q = _find(col, row_lo[i], row_hi[i], j - 1)
                if q >= 0 and reach[q] <= a:
                    j -= 1
                    continue
            break  # unreachable when labels are consistent
        out1[k] = j
        out2[k] = j2
        k += 1
        if target > 0 and k >= target:
            return k
        bound = j - 1
        while t >= s and col[t] > bound:
            t -= 1
    return k
