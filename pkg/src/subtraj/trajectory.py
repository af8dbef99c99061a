"""Trajectories, the concatenated store, and subtrajectory intervals.

All public indices are 1-based and inclusive: vertex ``i`` of a store with
``n`` vertices satisfies ``1 <= i <= n``, and the boundary edge ``i`` joins
vertex ``i`` to vertex ``i + 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Point",
    "Trajectory",
    "TrajectoryStore",
    "SubtrajectoryRef",
    "EmptyStoreError",
    "BoundaryViolationError",
    "IndexRangeError",
    "DisjointnessError",
    "concatenate",
    "make_subtrajectory",
    "remove_intervals",
]


class EmptyStoreError(ValueError):
    """Raised when a store would be built from no trajectories."""


class BoundaryViolationError(ValueError):
    """Raised when an interval contains a boundary edge."""


class IndexRangeError(IndexError):
    """Raised when an interval falls outside ``[1, n]``."""


class DisjointnessError(ValueError):
    """Raised when intervals that must be disjoint overlap."""


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite coordinate in {self!r}")


class Trajectory:
    """An ordered, non-empty sequence of planar vertices.

    Parameters
    ----------
    vertices : array_like
        ``(k, 2)`` coordinates, or a sequence of :class:`Point`.
    """

    def __init__(self, vertices):
        if len(vertices) and isinstance(vertices[0], Point):
            vertices = [(p.x, p.y) for p in vertices]
        arr = np.asarray(vertices, dtype=np.float64).reshape(-1, 2)
        if arr.shape[0] == 0:
            raise ValueError("a trajectory needs at least one vertex")
        if not np.all(np.isfinite(arr)):
            raise ValueError("trajectory coordinates must be finite")
        self.coords = arr

    def __len__(self):
        return self.coords.shape[0]

    def __getitem__(self, i):
        x, y = self.coords[i]
        return Point(float(x), float(y))

    def __eq__(self, other):
        return isinstance(other, Trajectory) and np.array_equal(self.coords, other.coords)

    def __repr__(self):
        return f"Trajectory(n={len(self)})"


@dataclass(frozen=True, order=True)
class SubtrajectoryRef:
    """The inclusive vertex interval ``[a, b]`` of a store.

    ``len(ref)`` is the vertex count ``b - a + 1``; :attr:`ell` is the edge
    count ``b - a`` used as the centre length by the SC solvers.
    """

    a: int
    b: int

    def __len__(self):
        return self.b - self.a + 1

    @property
    def ell(self) -> int:
        return self.b - self.a

    def overlaps(self, other: "SubtrajectoryRef") -> bool:
        return self.a <= other.b and other.a <= self.b


class TrajectoryStore:
    """All input trajectories concatenated into one vertex sequence.

    Immutable once built. ``orig_index`` keeps the 1-based index each vertex
    had in the store produced by :func:`concatenate`, so clusters found on a
    residual store can be mapped back.
    """

    def __init__(self, xy, seg_start, traj_id, local_index, orig_index):
        self.xy = np.ascontiguousarray(xy, dtype=np.float64).reshape(-1, 2)
        # 0-based index of the first vertex of the piece holding each vertex
        self.seg_start = np.ascontiguousarray(seg_start, dtype=np.int64)
        self.traj_id = np.ascontiguousarray(traj_id, dtype=np.int64)
        self.local_index = np.ascontiguousarray(local_index, dtype=np.int64)
        self.orig_index = np.ascontiguousarray(orig_index, dtype=np.int64)
        for arr in (self.xy, self.seg_start, self.traj_id, self.local_index, self.orig_index):
            arr.flags.writeable = False

    @property
    def n(self) -> int:
        return self.xy.shape[0]

    def __len__(self):
        return self.n

    @property
    def boundaries(self) -> frozenset:
        """1-based ``i`` such that edge ``(i, i + 1)`` is a boundary edge."""
        starts = np.nonzero(self.seg_start[1:] == np.arange(1, self.n))[0] + 1
        return frozenset(int(s) for s in starts)

    def segments(self) -> list[tuple[int, int]]:
        """Maximal boundary-free pieces as 1-based inclusive ``(lo, hi)`` pairs."""
        if self.n == 0:
            return []
        starts = np.nonzero(self.seg_start == np.arange(self.n))[0]
        ends = np.append(starts[1:], self.n)
        return [(int(s) + 1, int(e)) for s, e in zip(starts, ends)]

    def point(self, i: int) -> Point:
        x, y = self.xy[i - 1]
        return Point(float(x), float(y))

    def coords(self, ref: SubtrajectoryRef) -> np.ndarray:
        return self.xy[ref.a - 1 : ref.b]

    def origin(self, i: int) -> tuple[int, int]:
        """``(trajectory id, 1-based local index)`` of vertex ``i``."""
        return int(self.traj_id[i - 1]), int(self.local_index[i - 1])

    def is_boundary_free(self, a: int, b: int) -> bool:
        return bool(self.seg_start[b - 1] <= a - 1)

    def to_original(self, ref: SubtrajectoryRef) -> SubtrajectoryRef:
        return SubtrajectoryRef(int(self.orig_index[ref.a - 1]), int(self.orig_index[ref.b - 1]))

    def reversed(self) -> "TrajectoryStore":
        """The store read back to front; vertex ``i`` becomes ``n + 1 - i``."""
        n = self.n
        seg_end = np.empty(n, dtype=np.int64)
        for lo, hi in self.segments():
            seg_end[lo - 1 : hi] = hi - 1
        return TrajectoryStore(
            self.xy[::-1],
            (n - 1 - seg_end)[::-1],
            self.traj_id[::-1],
            self.local_index[::-1],
            self.orig_index[::-1],
        )

    def trajectories(self) -> list[Trajectory]:
        return [Trajectory(self.xy[lo - 1 : hi]) for lo, hi in self.segments()]

    def __repr__(self):
        return f"TrajectoryStore(n={self.n}, pieces={len(self.segments())})"


def concatenate(trajectories: Sequence[Trajectory]) -> TrajectoryStore:
    """Concatenate trajectories in order, marking one boundary per junction.

    Raises
    ------
    EmptyStoreError
        If ``trajectories`` is empty.
    """
    trajectories = [t if isinstance(t, Trajectory) else Trajectory(t) for t in trajectories]
    if not trajectories:
        raise EmptyStoreError("cannot build a store from zero trajectories")
    lengths = np.array([len(t) for t in trajectories], dtype=np.int64)
    starts = np.concatenate([[0], np.cumsum(lengths)[:-1]])
    xy = np.concatenate([t.coords for t in trajectories])
    seg_start = np.repeat(starts, lengths)
    traj_id = np.repeat(np.arange(len(trajectories)), lengths)
    local = np.arange(xy.shape[0]) - seg_start + 1
    return TrajectoryStore(xy, seg_start, traj_id, local, np.arange(1, xy.shape[0] + 1))


def make_subtrajectory(store: TrajectoryStore, a: int, b: int) -> SubtrajectoryRef:
    """Validate ``[a, b]`` against ``store`` and return it.

    Raises
    ------
    IndexRangeError
        Unless ``1 <= a <= b <= n``.
    BoundaryViolationError
        If the interval contains a boundary edge.
    """
    if not (1 <= a <= b <= store.n):
        raise IndexRangeError(f"[{a}, {b}] outside [1, {store.n}] or reversed")
    if not store.is_boundary_free(a, b):
        raise BoundaryViolationError(f"[{a}, {b}] contains a boundary edge")
    return SubtrajectoryRef(a, b)


def _check_disjoint(intervals: Iterable[SubtrajectoryRef]) -> list[SubtrajectoryRef]:
    ordered = sorted(intervals)
    for prev, cur in zip(ordered, ordered[1:]):
        if cur.a <= prev.b:
            raise DisjointnessError(f"{prev} overlaps {cur}")
    return ordered


def remove_intervals(store: TrajectoryStore, intervals: Iterable[SubtrajectoryRef]) -> TrajectoryStore:
    """Delete every vertex inside ``intervals`` and re-index the survivors.

    Each surviving contiguous run becomes its own piece: a boundary edge is
    placed wherever a cut was made, and existing boundaries are kept.

    Raises
    ------
    DisjointnessError
        If two intervals overlap.
    """
    ordered = _check_disjoint(intervals)
    for ref in ordered:
        make_subtrajectory(store, ref.a, ref.b)
    keep = np.ones(store.n, dtype=bool)
    for ref in ordered:
        keep[ref.a - 1 : ref.b] = False
    survivors = np.nonzero(keep)[0]
    m = survivors.size
    # a new piece starts after a gap or where an old piece started
    new_piece = np.ones(m, dtype=bool)
    if m > 1:
        prev, cur = survivors[:-1], survivors[1:]
        new_piece[1:] = (cur != prev + 1) | (store.seg_start[cur] == cur)
    seg_start = np.maximum.accumulate(np.where(new_piece, np.arange(m), 0)) if m else np.empty(0, np.int64)
    return TrajectoryStore(
        store.xy[survivors],
        seg_start,
        store.traj_id[survivors],
        store.local_index[survivors],
        store.orig_index[survivors],
    )
