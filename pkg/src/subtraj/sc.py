"""The SC(m, l, delta) solver family over a sliding row window.

Centre length follows the edge-count convention: a centre ``[a, b]`` has
length ``ell = b - a`` and therefore ``ell + 1`` vertices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .freespace import RowWindow, window_step_first, window_step_second
from .rangeindex import RangeIndex
from .trajectory import SubtrajectoryRef, TrajectoryStore

__all__ = [
    "LENGTH_IS_EDGE_COUNT",
    "Cluster",
    "query_centre",
    "sc_fixed",
    "sc_max_cardinality",
    "sc_max_length",
]

# ell counts edges of the centre, not vertices
LENGTH_IS_EDGE_COUNT = True


@dataclass(frozen=True)
class Cluster:
    """A centre and its pairwise-disjoint members, all within ``delta`` of it.

    Members are sorted by start index. ``member_distances`` is filled in
    lazily by the clustering code when exact Fréchet values are needed.
    """

    centre: SubtrajectoryRef
    members: tuple
    delta: float
    member_distances: Optional[tuple] = field(default=None, compare=False)

    @property
    def cardinality(self) -> int:
        return len(self.members)

    @property
    def coverage(self) -> int:
        return sum(len(m) for m in self.members)

    def with_distances(self, distances) -> "Cluster":
        return Cluster(self.centre, self.members, self.delta, tuple(distances))


def _cluster(a, b, pairs, delta):
    members = tuple(sorted(SubtrajectoryRef(j1, j2) for j1, j2 in pairs))
    return Cluster(SubtrajectoryRef(a, b), members, float(delta))


def query_centre(window: RowWindow, a: int, b: int, target: Optional[int] = None) -> Optional[Cluster]:
    """Greedy disjoint members for the centre spanned by ``window``.

    Without ``target`` the member set has maximum cardinality. With
    ``target`` the scan stops once that many members are found, and
    ``None`` is returned if fewer exist.
    """
    if (window.a, window.b) != (a, b):
        raise ValueError(f"window spans [{window.a}, {window.b}], not [{a}, {b}]")
    pairs = window.query(target or 0)
    if target is not None and len(pairs) < target:
        return None
    return _cluster(a, b, pairs, window.delta)


def _fixed_windows(store, ell, delta, index, dense, observer):
    window = RowWindow(store, delta, index=index, dense=dense)
    for lo, hi in store.segments():
        if hi - lo < ell:
            continue
        window.reset(lo)
        for r in range(lo, lo + ell + 1):
            window_step_second(window, store, r)
        if observer:
            observer(window)
        yield window
        for b in range(lo + ell + 1, hi + 1):
            window_step_first(window)
            window_step_second(window, store, b)
            if observer:
                observer(window)
            yield window


def sc_fixed(m: int, ell: int, delta: float, store: TrajectoryStore, index: RangeIndex = None,
             dense: bool = False, observer: Callable = None) -> Optional[Cluster]:
    """First centre of length ``ell`` (in sweep order) with at least ``m`` members."""
    if m < 1 or ell < 0 or delta < 0:
        raise ValueError("need m >= 1, ell >= 0, delta >= 0")
    for window in _fixed_windows(store, ell, delta, index, dense, observer):
        found = query_centre(window, window.a, window.b, target=m)
        if found is not None:
            return found
    return None


def sc_max_cardinality(ell: int, delta: float, store: TrajectoryStore, index: RangeIndex = None,
                       dense: bool = False, observer: Callable = None) -> Optional[Cluster]:
    """Centre of length ``ell`` with the most members; ties go to the smallest start."""
    if ell < 0 or delta < 0:
        raise ValueError("need ell >= 0, delta >= 0")
    best = None
    for window in _fixed_windows(store, ell, delta, index, dense, observer):
        found = query_centre(window, window.a, window.b)
        if best is None or found.cardinality > best.cardinality:
            best = found
    return best


def sc_max_length(m: int, delta: float, store: TrajectoryStore, index: RangeIndex = None,
                  dense: bool = False, observer: Callable = None) -> Optional[Cluster]:
    """Longest centre with ``m`` members, by a two-pointer sweep.

    Growing a centre can only lose members, so for each bottom row the
    top row only ever moves down. Ties go to the smallest start.
    """
    if m < 1 or delta < 0:
        raise ValueError("need m >= 1, delta >= 0")
    window = RowWindow(store, delta, index=index, dense=dense)
    best = None
    for lo, hi in store.segments():
        window.reset(lo)
        window_step_second(window, store, lo)
        while True:
            if observer:
                observer(window)
            a, b = window.a, window.b
            found = query_centre(window, a, b, target=m)
            if found is not None:
                if best is None or b - a > best.centre.ell:
                    best = found
                if b == hi:
                    break
                window_step_second(window, store, b + 1)
            elif a < b:
                window_step_first(window)
            elif b < hi:
                window_step_first(window)
                window_step_second(window, store, b + 1)
            else:
                break
    return best
